#pragma once

#include <algorithm>
#include <string>

#include "seprisk/nn/init.hpp"
#include "seprisk/nn/tensor.hpp"

namespace seprisk::nn {

// 3x3 convolution, stride 1, zero "same" padding, over a batch [N, C_in, H, W].
class Conv2d {
 public:
  static constexpr std::size_t kKernel = 3;

  Conv2d() = default;
  Conv2d(std::string name, std::size_t in_channels, std::size_t out_channels)
      : in_(in_channels),
        out_(out_channels),
        weight_(name + ".weight", out_channels * in_channels * kKernel * kKernel),
        bias_(name + ".bias", out_channels) {}

  static std::size_t param_count(std::size_t in_channels, std::size_t out_channels) {
    return (kKernel * kKernel * in_channels + 1) * out_channels;
  }

  std::size_t in_channels() const { return in_; }
  std::size_t out_channels() const { return out_; }
  Param& weight() { return weight_; }
  Param& bias() { return bias_; }
  const Param& weight() const { return weight_; }
  const Param& bias() const { return bias_; }
  std::vector<Param*> params() { return {&weight_, &bias_}; }

  void init(Rng& rng) {
    glorot_uniform(weight_.value, in_ * kKernel * kKernel, out_ * kKernel * kKernel, rng);
    std::fill(bias_.value.begin(), bias_.value.end(), 0.0);
  }

  Tensor forward(const Tensor& x) const {
    check_input(x);
    const std::size_t n = x.dim(0), h = x.dim(2), w = x.dim(3), plane = h * w;
    Tensor y({n, out_, h, w});
    const double* in = x.data().data();
    double* out = y.data().data();
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t o = 0; o < out_; ++o) {
        double* yo = out + (b * out_ + o) * plane;
        std::fill(yo, yo + plane, bias_.value[o]);
        for (std::size_t i = 0; i < in_; ++i) {
          const double* xi = in + (b * in_ + i) * plane;
          const double* k = &weight_.value[(o * in_ + i) * 9];
          for (std::size_t ky = 0; ky < 3; ++ky) {
            for (std::size_t kx = 0; kx < 3; ++kx) {
              const double wv = k[ky * 3 + kx];
              const std::size_t y0 = ky == 0 ? 1 : 0, y1 = ky == 2 ? h - 1 : h;
              const std::size_t x0 = kx == 0 ? 1 : 0, x1 = kx == 2 ? w - 1 : w;
              for (std::size_t r = y0; r < y1; ++r) {
                const double* src = xi + (r + ky - 1) * w + (kx - 1);
                double* dst = yo + r * w;
                for (std::size_t c = x0; c < x1; ++c) dst[c] += wv * src[c];
              }
            }
          }
        }
      }
    }
    return y;
  }

  // Accumulates weight/bias gradients; returns dL/dx.
  Tensor backward(const Tensor& x, const Tensor& grad_out) {
    check_input(x);
    const std::size_t n = x.dim(0), h = x.dim(2), w = x.dim(3), plane = h * w;
    require(grad_out.shape() == Shape({n, out_, h, w}), "conv2d: gradient shape mismatch");
    Tensor gx(x.shape());
    const double* in = x.data().data();
    const double* go = grad_out.data().data();
    double* gi = gx.data().data();
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t o = 0; o < out_; ++o) {
        const double* g = go + (b * out_ + o) * plane;
        double gb = 0.0;
        for (std::size_t p = 0; p < plane; ++p) gb += g[p];
        bias_.grad[o] += gb;
        for (std::size_t i = 0; i < in_; ++i) {
          const double* xi = in + (b * in_ + i) * plane;
          double* gxi = gi + (b * in_ + i) * plane;
          const double* k = &weight_.value[(o * in_ + i) * 9];
          double* gk = &weight_.grad[(o * in_ + i) * 9];
          for (std::size_t ky = 0; ky < 3; ++ky) {
            for (std::size_t kx = 0; kx < 3; ++kx) {
              const double wv = k[ky * 3 + kx];
              const std::size_t y0 = ky == 0 ? 1 : 0, y1 = ky == 2 ? h - 1 : h;
              const std::size_t x0 = kx == 0 ? 1 : 0, x1 = kx == 2 ? w - 1 : w;
              double acc = 0.0;
              for (std::size_t r = y0; r < y1; ++r) {
                const double* src = xi + (r + ky - 1) * w + (kx - 1);
                double* dsrc = gxi + (r + ky - 1) * w + (kx - 1);
                const double* gr = g + r * w;
                for (std::size_t c = x0; c < x1; ++c) {
                  acc += gr[c] * src[c];
                  dsrc[c] += wv * gr[c];
                }
              }
              gk[ky * 3 + kx] += acc;
            }
          }
        }
      }
    }
    return gx;
  }

 private:
  void check_input(const Tensor& x) const {
    require(x.rank() == 4, "conv2d: expected [N,C,H,W] input, got " + shape_string(x.shape()));
    require(x.dim(1) == in_, "conv2d: input has " + std::to_string(x.dim(1)) +
                                 " channels, kernel expects " + std::to_string(in_));
    require(x.dim(2) > 0 && x.dim(3) > 0, "conv2d: empty spatial dims");
  }

  std::size_t in_ = 0;
  std::size_t out_ = 0;
  Param weight_;
  Param bias_;
};

}  // namespace seprisk::nn
