#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "seprisk/nn/tensor.hpp"

namespace seprisk::nn {

struct RmsPropConfig {
  double learning_rate = 0.001;
  double decay = 0.9;
  double epsilon = 1e-7;
};

// Squared-gradient accumulators, one buffer per parameter buffer.
struct RmsPropState {
  RmsPropConfig config;
  std::vector<std::vector<double>> accum;
};

// s <- decay*s + (1-decay)*g^2 ; theta <- theta - lr*g/(sqrt(s)+eps)
inline void rmsprop_step(std::span<double> params, std::span<const double> grads,
                         std::vector<double>& accum, const RmsPropConfig& cfg) {
  require(params.size() == grads.size(), "rmsprop: gradient/parameter size mismatch");
  if (accum.empty()) accum.assign(params.size(), 0.0);
  require(accum.size() == params.size(), "rmsprop: state/parameter size mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    accum[i] = cfg.decay * accum[i] + (1.0 - cfg.decay) * g * g;
    params[i] -= cfg.learning_rate * g / (std::sqrt(accum[i]) + cfg.epsilon);
  }
}

// Steps every trainable buffer in `params`; state is sized on first use.
inline void rmsprop_step(const std::vector<Param*>& params, RmsPropState& state) {
  std::size_t k = 0;
  for (Param* p : params) {
    if (!p->trainable) continue;
    if (state.accum.size() <= k) state.accum.resize(k + 1);
    rmsprop_step(p->value, p->grad, state.accum[k], state.config);
    ++k;
  }
}

}  // namespace seprisk::nn
