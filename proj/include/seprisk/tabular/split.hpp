#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "seprisk/random.hpp"
#include "seprisk/error.hpp"

namespace seprisk::tabular {

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
};

struct SplitConfig {
  double test_fraction = 0.2;
  double validation_fraction = 0.1;  // of the non-test remainder
};

// Stratified test split, class-balanced validation split, remainder trains.
inline Split split_cohort(std::span<const int> labels, std::uint64_t seed, const SplitConfig& cfg = {}) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] ? pos : neg).push_back(i);
  Rng rng(seed);
  rng.shuffle(pos);
  rng.shuffle(neg);
  const auto n_test_pos = static_cast<std::size_t>(std::llround(cfg.test_fraction * static_cast<double>(pos.size())));
  const auto n_test_neg = static_cast<std::size_t>(std::llround(cfg.test_fraction * static_cast<double>(neg.size())));
  const std::size_t remaining = labels.size() - n_test_pos - n_test_neg;
  const std::size_t n_val = static_cast<std::size_t>(std::llround(cfg.validation_fraction * static_cast<double>(remaining)));
  const std::size_t half = n_val / 2;
  require(half >= 1, "split: validation set would be empty");
  require(pos.size() >= n_test_pos + half + 1 && neg.size() >= n_test_neg + half + 1,
          "split: not enough minority-class rows for a balanced validation set");
  Split s;
  s.test.insert(s.test.end(), pos.begin(), pos.begin() + n_test_pos);
  s.test.insert(s.test.end(), neg.begin(), neg.begin() + n_test_neg);
  s.validation.insert(s.validation.end(), pos.begin() + n_test_pos, pos.begin() + n_test_pos + half);
  s.validation.insert(s.validation.end(), neg.begin() + n_test_neg, neg.begin() + n_test_neg + half);
  s.train.insert(s.train.end(), pos.begin() + n_test_pos + half, pos.end());
  s.train.insert(s.train.end(), neg.begin() + n_test_neg + half, neg.end());
  require(!s.test.empty(), "split: test set would be empty");
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.validation.begin(), s.validation.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

}  // namespace seprisk::tabular
