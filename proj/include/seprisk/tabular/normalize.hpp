#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "seprisk/tabular/cohort.hpp"

namespace seprisk::tabular {

struct FeatureRange {
  double min = 0.0;
  double max = 0.0;
  bool constant() const { return !(max > min); }
  friend bool operator==(const FeatureRange&, const FeatureRange&) = default;
};

// Training-set min/max per column; kept with the model for reuse at inference.
struct NormStats {
  std::vector<FeatureRange> ranges;
  std::vector<std::string> warnings;
};

// Maps min -> -1 and max -> +1; values outside the training range extrapolate.
// Constant features map to 0.
inline double minmax_value(double x, const FeatureRange& r) {
  if (is_missing(x)) return x;
  if (r.constant()) return 0.0;
  return 2.0 * (x - r.min) / (r.max - r.min) - 1.0;
}

inline double minmax_inverse(double x, const FeatureRange& r) {
  if (r.constant()) return r.min;
  return (x + 1.0) * 0.5 * (r.max - r.min) + r.min;
}

inline FeatureRange fit_range(std::span<const double> column) {
  FeatureRange r{0.0, 0.0};
  bool any = false;
  for (double v : column) {
    if (is_missing(v)) continue;
    if (!any) r = {v, v};
    r.min = std::min(r.min, v);
    r.max = std::max(r.max, v);
    any = true;
  }
  return r;
}

inline NormStats minmax_fit(const Cohort& train) {
  NormStats s;
  for (std::size_t c = 0; c < train.cols(); ++c) {
    s.ranges.push_back(fit_range(train.column(c)));
    if (s.ranges.back().constant())
      s.warnings.push_back("feature '" + train.specs[c].name + "' is constant on the training rows; mapped to 0");
  }
  return s;
}

inline Cohort minmax_apply(Cohort rows, const NormStats& stats) {
  require(stats.ranges.size() == rows.cols(), "minmax_apply: stats do not match column count");
  for (std::size_t r = 0; r < rows.rows(); ++r)
    for (std::size_t c = 0; c < rows.cols(); ++c) rows.at(r, c) = minmax_value(rows.at(r, c), stats.ranges[c]);
  return rows;
}

}  // namespace seprisk::tabular
