#pragma once

#include <limits>

#include "seprisk/nn/tensor.hpp"

namespace seprisk::nn {

// 3x3 max pooling, stride 3, partial windows kept at the edges:
// [N, C, H, W] -> [N, C, ceil(H/3), ceil(W/3)].
struct MaxPoolCache {
  Shape input_shape;
  std::vector<std::size_t> argmax;  // flat input index per output cell
};

constexpr std::size_t kPool = 3;

inline std::size_t pooled_extent(std::size_t n) { return (n + kPool - 1) / kPool; }

inline Tensor max_pool(const Tensor& x, MaxPoolCache* cache = nullptr) {
  require(x.rank() == 4, "max_pool: expected [N,C,H,W] input, got " + shape_string(x.shape()));
  const std::size_t n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
  const std::size_t oh = pooled_extent(h), ow = pooled_extent(w);
  Tensor y({n, c, oh, ow});
  std::vector<std::size_t> argmax(y.size());
  for (std::size_t p = 0; p < n * c; ++p) {
    const std::size_t in_off = p * h * w, out_off = p * oh * ow;
    for (std::size_t oy = 0; oy < oh; ++oy) {
      for (std::size_t ox = 0; ox < ow; ++ox) {
        double best = -std::numeric_limits<double>::infinity();
        std::size_t best_idx = 0;
        bool first = true;
        for (std::size_t r = oy * kPool; r < std::min(h, oy * kPool + kPool); ++r) {
          for (std::size_t q = ox * kPool; q < std::min(w, ox * kPool + kPool); ++q) {
            const std::size_t idx = in_off + r * w + q;
            if (first || x[idx] > best) {
              best = x[idx];
              best_idx = idx;
              first = false;
            }
          }
        }
        y[out_off + oy * ow + ox] = best;
        argmax[out_off + oy * ow + ox] = best_idx;
      }
    }
  }
  if (cache) {
    cache->input_shape = x.shape();
    cache->argmax = std::move(argmax);
  }
  return y;
}

inline Tensor max_pool_backward(const MaxPoolCache& cache, const Tensor& grad_out) {
  require(grad_out.size() == cache.argmax.size(), "max_pool: gradient shape mismatch");
  Tensor gx(cache.input_shape);
  for (std::size_t i = 0; i < grad_out.size(); ++i) gx[cache.argmax[i]] += grad_out[i];
  return gx;
}

}  // namespace seprisk::nn
