#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <vector>

#include "seprisk/error.hpp"

namespace seprisk::eval {

// Mann-Whitney estimate of the ROC AUC; tied scores share their average
// rank, so each positive/negative tie counts one half.
inline double auc(std::span<const double> scores, std::span<const int> labels) {
  require(scores.size() == labels.size(), "auc: score/label length mismatch");
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  double n_pos = 0.0;
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && scores[idx[j + 1]] == scores[idx[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + j + 2);  // 1-based
    for (std::size_t k = i; k <= j; ++k) {
      if (labels[idx[k]]) {
        rank_sum += avg_rank;
        n_pos += 1.0;
      }
    }
    i = j + 1;
  }
  const double n_neg = static_cast<double>(scores.size()) - n_pos;
  require(n_pos > 0 && n_neg > 0, "auc: both classes must be present");
  return (rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

}  // namespace seprisk::eval
