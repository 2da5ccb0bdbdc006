#pragma once

#include <span>

#include "seprisk/eval/auc.hpp"

namespace seprisk::synth {

// AUC of the generating probabilities against realized labels: the
// reference ceiling for any fitted model on the same rows.
inline double oracle_auc(std::span<const double> true_prob, std::span<const int> labels) {
  return eval::auc(true_prob, labels);
}

}  // namespace seprisk::synth
