#pragma once

#include <string>

#include "seprisk/nn/activation.hpp"
#include "seprisk/nn/init.hpp"
#include "seprisk/nn/tensor.hpp"

namespace seprisk::nn {

// Fully connected layer over a batch [N, D] -> [N, units].
class Dense {
 public:
  Dense() = default;
  Dense(std::string name, std::size_t input_dim, std::size_t units, Activation act)
      : in_(input_dim),
        units_(units),
        act_(act),
        weight_(name + ".weight", units * input_dim),
        bias_(name + ".bias", units) {}

  static std::size_t param_count(std::size_t input_dim, std::size_t units) {
    return (input_dim + 1) * units;
  }

  std::size_t input_dim() const { return in_; }
  std::size_t units() const { return units_; }
  Activation activation() const { return act_; }
  std::vector<Param*> params() { return {&weight_, &bias_}; }
  Param& weight() { return weight_; }
  Param& bias() { return bias_; }

  void init(Rng& rng) {
    glorot_uniform(weight_.value, in_, units_, rng);
    std::fill(bias_.value.begin(), bias_.value.end(), 0.0);
  }

  // Output after activation.
  Tensor forward(const Tensor& x) const {
    require(x.rank() == 2 && x.dim(1) == in_,
            "dense: expected [N," + std::to_string(in_) + "] input, got " + shape_string(x.shape()));
    const std::size_t n = x.dim(0);
    Tensor y({n, units_});
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t u = 0; u < units_; ++u) {
        double s = bias_.value[u];
        const double* w = &weight_.value[u * in_];
        for (std::size_t d = 0; d < in_; ++d) s += w[d] * x.at(b, d);
        y.at(b, u) = activate(act_, s);
      }
    }
    return y;
  }

  // x: layer input, out: forward output, grad_out: dL/d(out). Returns dL/dx.
  Tensor backward(const Tensor& x, const Tensor& out, const Tensor& grad_out) {
    const std::size_t n = x.dim(0);
    require(grad_out.shape() == Shape({n, units_}), "dense: gradient shape mismatch");
    Tensor gx({n, in_});
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t u = 0; u < units_; ++u) {
        const double g = grad_out.at(b, u) * activation_slope(act_, out.at(b, u));
        bias_.grad[u] += g;
        double* gw = &weight_.grad[u * in_];
        const double* w = &weight_.value[u * in_];
        for (std::size_t d = 0; d < in_; ++d) {
          gw[d] += g * x.at(b, d);
          gx.at(b, d) += g * w[d];
        }
      }
    }
    return gx;
  }

 private:
  std::size_t in_ = 0;
  std::size_t units_ = 0;
  Activation act_ = Activation::none;
  Param weight_;
  Param bias_;
};

}  // namespace seprisk::nn
