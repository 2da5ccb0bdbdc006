#pragma once

#include <cmath>
#include <string>

#include "seprisk/nn/tensor.hpp"

namespace seprisk::nn {

enum class Mode { train, infer };

struct BatchNormCache {
  Tensor xhat;
  std::vector<double> inv_std;
  Mode mode = Mode::infer;
};

// Per-channel batch normalization over [N, C, H, W]. Statistics span the
// batch and spatial dims. Two trainable (gamma, beta) and two non-trainable
// (running mean, running variance) values per channel.
class BatchNorm {
 public:
  static constexpr double kMomentum = 0.99;
  static constexpr double kEpsilon = 1e-3;

  BatchNorm() = default;
  BatchNorm(std::string name, std::size_t channels)
      : channels_(channels),
        gamma_(name + ".gamma", channels),
        beta_(name + ".beta", channels),
        running_mean_(name + ".running_mean", channels, false),
        running_var_(name + ".running_var", channels, false) {
    reset();
  }

  static ParamCount param_count(std::size_t channels) { return {2 * channels, 2 * channels}; }

  void reset() {
    std::fill(gamma_.value.begin(), gamma_.value.end(), 1.0);
    std::fill(beta_.value.begin(), beta_.value.end(), 0.0);
    std::fill(running_mean_.value.begin(), running_mean_.value.end(), 0.0);
    std::fill(running_var_.value.begin(), running_var_.value.end(), 1.0);
  }

  std::size_t channels() const { return channels_; }
  Param& gamma() { return gamma_; }
  Param& beta() { return beta_; }
  const Param& running_mean() const { return running_mean_; }
  const Param& running_var() const { return running_var_; }
  std::vector<Param*> params() { return {&gamma_, &beta_, &running_mean_, &running_var_}; }

  // Train mode normalizes with batch statistics and, when update_stats is
  // set, folds them into the running averages.
  Tensor forward(const Tensor& x, Mode mode, BatchNormCache* cache = nullptr,
                 bool update_stats = true) {
    require(x.rank() == 4 && x.dim(1) == channels_,
            "batch_norm: expected [N," + std::to_string(channels_) + ",H,W], got " +
                shape_string(x.shape()));
    const std::size_t n = x.dim(0), plane = x.dim(2) * x.dim(3);
    const double count = static_cast<double>(n * plane);
    Tensor y(x.shape());
    Tensor xhat(x.shape());
    std::vector<double> inv_std(channels_);
    for (std::size_t c = 0; c < channels_; ++c) {
      double mean = running_mean_.value[c];
      double var = running_var_.value[c];
      if (mode == Mode::train) {
        double s = 0.0;
        for (std::size_t b = 0; b < n; ++b) {
          const double* p = x.data().data() + (b * channels_ + c) * plane;
          for (std::size_t i = 0; i < plane; ++i) s += p[i];
        }
        mean = s / count;
        double ss = 0.0;
        for (std::size_t b = 0; b < n; ++b) {
          const double* p = x.data().data() + (b * channels_ + c) * plane;
          for (std::size_t i = 0; i < plane; ++i) ss += (p[i] - mean) * (p[i] - mean);
        }
        var = ss / count;
        if (update_stats) {
          running_mean_.value[c] = kMomentum * running_mean_.value[c] + (1.0 - kMomentum) * mean;
          running_var_.value[c] = kMomentum * running_var_.value[c] + (1.0 - kMomentum) * var;
        }
      }
      inv_std[c] = 1.0 / std::sqrt(var + kEpsilon);
      const double g = gamma_.value[c], be = beta_.value[c];
      for (std::size_t b = 0; b < n; ++b) {
        const std::size_t off = (b * channels_ + c) * plane;
        for (std::size_t i = 0; i < plane; ++i) {
          const double h = (x[off + i] - mean) * inv_std[c];
          xhat[off + i] = h;
          y[off + i] = g * h + be;
        }
      }
    }
    if (cache) {
      cache->xhat = std::move(xhat);
      cache->inv_std = std::move(inv_std);
      cache->mode = mode;
    }
    return y;
  }

  Tensor backward(const BatchNormCache& cache, const Tensor& grad_out) {
    const Tensor& xhat = cache.xhat;
    require(grad_out.shape() == xhat.shape(), "batch_norm: gradient shape mismatch");
    const std::size_t n = xhat.dim(0), plane = xhat.dim(2) * xhat.dim(3);
    const double count = static_cast<double>(n * plane);
    Tensor gx(xhat.shape());
    for (std::size_t c = 0; c < channels_; ++c) {
      double sum_g = 0.0, sum_gx = 0.0;
      for (std::size_t b = 0; b < n; ++b) {
        const std::size_t off = (b * channels_ + c) * plane;
        for (std::size_t i = 0; i < plane; ++i) {
          sum_g += grad_out[off + i];
          sum_gx += grad_out[off + i] * xhat[off + i];
        }
      }
      gamma_.grad[c] += sum_gx;
      beta_.grad[c] += sum_g;
      const double scale = gamma_.value[c] * cache.inv_std[c];
      for (std::size_t b = 0; b < n; ++b) {
        const std::size_t off = (b * channels_ + c) * plane;
        for (std::size_t i = 0; i < plane; ++i) {
          if (cache.mode == Mode::train) {
            gx[off + i] =
                scale * (grad_out[off + i] - sum_g / count - xhat[off + i] * sum_gx / count);
          } else {
            gx[off + i] = scale * grad_out[off + i];
          }
        }
      }
    }
    return gx;
  }

 private:
  std::size_t channels_ = 0;
  Param gamma_;
  Param beta_;
  Param running_mean_;
  Param running_var_;
};

}  // namespace seprisk::nn
