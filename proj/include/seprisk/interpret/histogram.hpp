#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "seprisk/tabular/cohort.hpp"

namespace seprisk::interpret {

// Per-class densities over shared bins. Label 0 is a survivor, 1 a
// non-survivor; each histogram sums to 1.
struct ClassHistograms {
  std::vector<double> edges;  // bins + 1 ascending edges
  std::vector<double> survivor;
  std::vector<double> nonsurvivor;
};

inline std::vector<double> uniform_edges(double lo, double hi, std::size_t bins) {
  require(bins >= 1, "histogram: need at least one bin");
  if (!(hi > lo)) hi = lo + 1.0;
  std::vector<double> e(bins + 1);
  for (std::size_t k = 0; k <= bins; ++k) e[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(bins);
  e.back() = hi;
  return e;
}

// Bins are [e_k, e_k+1); the last bin also holds e_bins. Values outside the
// edges and missing values are ignored.
inline ClassHistograms class_histograms(std::span<const double> values, std::span<const int> labels,
                                        std::vector<double> edges) {
  require(values.size() == labels.size(), "histogram: value/label length mismatch");
  require(edges.size() >= 2 && std::is_sorted(edges.begin(), edges.end()), "histogram: edges must be ascending");
  const std::size_t bins = edges.size() - 1;
  ClassHistograms h{std::move(edges), std::vector<double>(bins, 0.0), std::vector<double>(bins, 0.0)};
  double n0 = 0.0, n1 = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (tabular::is_missing(v) || v < h.edges.front() || v > h.edges.back()) continue;
    auto it = std::upper_bound(h.edges.begin(), h.edges.end(), v);
    std::size_t k = static_cast<std::size_t>(it - h.edges.begin()) - 1;
    k = std::min(k, bins - 1);
    (labels[i] ? h.nonsurvivor : h.survivor)[k] += 1.0;
    (labels[i] ? n1 : n0) += 1.0;
  }
  require(n0 > 0 && n1 > 0, "histogram: a class has no observed values");
  for (double& v : h.survivor) v /= n0;
  for (double& v : h.nonsurvivor) v /= n1;
  return h;
}

inline ClassHistograms class_histograms(const tabular::Cohort& cohort, const std::string& feature, std::size_t bins) {
  const auto col = cohort.column(cohort.index_of(feature));
  double lo = INFINITY, hi = -INFINITY;
  for (double v : col)
    if (!tabular::is_missing(v)) lo = std::min(lo, v), hi = std::max(hi, v);
  require(lo <= hi, "histogram: feature '" + feature + "' has no observed values");
  return class_histograms(col, cohort.labels, uniform_edges(lo, hi, bins));
}

}  // namespace seprisk::interpret
