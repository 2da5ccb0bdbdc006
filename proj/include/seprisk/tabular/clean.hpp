#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "seprisk/tabular/cohort.hpp"

namespace seprisk::tabular {

// Linear-interpolation quantile (R type 7) of an ascending sample.
inline double quantile_sorted(std::span<const double> sorted, double q) {
  require(!sorted.empty(), "quantile: empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline std::vector<double> observed_sorted(std::span<const double> column) {
  std::vector<double> v;
  for (double x : column)
    if (!is_missing(x)) v.push_back(x);
  std::sort(v.begin(), v.end());
  return v;
}

struct CleanResult {
  std::vector<double> values;
  std::size_t flagged = 0;
  bool all_missing = false;  // warning: nothing to clean
};

// Out-of-limit values become missing. Without limits a value is dropped only
// when it is beyond mean +/- 3 sd AND beyond [Q1 - 3 IQR, Q3 + 3 IQR]; the
// statistics come from the incoming column.
inline CleanResult clean_outliers(std::span<const double> column, const FeatureSpec& spec) {
  CleanResult out{std::vector<double>(column.begin(), column.end()), 0, false};
  const std::vector<double> obs = observed_sorted(column);
  if (obs.empty()) {
    out.all_missing = true;
    return out;
  }
  if (spec.limits) {
    for (double& v : out.values) {
      if (!is_missing(v) && (v < spec.limits->lo || v > spec.limits->hi)) {
        v = kMissing;
        ++out.flagged;
      }
    }
    return out;
  }
  if (spec.kind != FeatureKind::continuous || obs.size() < 2) return out;
  double mean = 0.0;
  for (double v : obs) mean += v;
  mean /= static_cast<double>(obs.size());
  double ss = 0.0;
  for (double v : obs) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(obs.size() - 1));
  const double q1 = quantile_sorted(obs, 0.25), q3 = quantile_sorted(obs, 0.75);
  const double iqr = q3 - q1;
  for (double& v : out.values) {
    if (is_missing(v)) continue;
    const bool sd_rule = v < mean - 3.0 * sd || v > mean + 3.0 * sd;
    const bool iqr_rule = v < q1 - 3.0 * iqr || v > q3 + 3.0 * iqr;
    if (sd_rule && iqr_rule) {
      v = kMissing;
      ++out.flagged;
    }
  }
  return out;
}

}  // namespace seprisk::tabular
