#pragma once

#include <cstdint>
#include <vector>

#include "seprisk/error.hpp"
#include "seprisk/nn/rmsprop.hpp"

namespace seprisk {

// How constrained fusion weights are kept non-negative after each step.
// reflect maps (w, a) to (|w|, sign(w) a), which leaves the model output
// unchanged; clip sets negative weights to 0.
enum class Projection { reflect, clip };

// Shared training-loop settings: RMSProp, class-weighted BCE, early stopping
// on validation loss.
struct TrainConfig {
  std::size_t max_epochs = 200;
  std::size_t patience = 10;
  std::size_t batch_size = 256;
  std::size_t degree = 3;
  std::uint64_t seed = 0;
  bool constrained = true;
  Projection projection = Projection::reflect;
  nn::RmsPropConfig optimizer;

  void validate() const {
    require(batch_size > 0, "train config: batch_size must be positive");
    require(degree >= 1, "train config: polynomial degree must be >= 1");
    require(max_epochs == 0 || patience < max_epochs,
            "train config: patience must be smaller than max_epochs");
    require(optimizer.learning_rate > 0 && optimizer.decay >= 0 && optimizer.decay < 1 &&
                optimizer.epsilon > 0,
            "train config: invalid optimizer settings");
  }
};

struct LossHistory {
  std::vector<double> train;
  std::vector<double> validation;
  std::size_t best_epoch = 0;  // 1-based; 0 means the initial parameters were kept
};

}  // namespace seprisk
