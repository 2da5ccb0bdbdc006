#pragma once

#include <cmath>
#include <span>

#include "seprisk/random.hpp"

namespace seprisk::nn {

// Glorot/Xavier uniform: U(-limit, limit), limit = sqrt(6 / (fan_in + fan_out)).
inline void glorot_uniform(std::span<double> w, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double& v : w) v = rng.uniform(-limit, limit);
}

}  // namespace seprisk::nn
