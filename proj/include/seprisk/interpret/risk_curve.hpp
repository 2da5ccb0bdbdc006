#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "seprisk/additive/model.hpp"
#include "seprisk/interpret/histogram.hpp"
#include "seprisk/tabular/clean.hpp"

namespace seprisk::interpret {

struct GridSpec {
  std::size_t points = 101;
  double lower_quantile = 0.01;
  double upper_quantile = 0.99;
};

// One feature's contribution curve per run, in original units. The odds
// factor divides out the curve's own minimum over the grid.
struct RiskCurve {
  std::string feature;
  std::vector<double> grid;
  std::vector<std::vector<double>> contribution;  // [run][point], w * p(x)
  std::vector<std::vector<double>> odds_factor;   // [run][point]
  std::vector<double> mean;                       // odds factor across runs
  std::vector<double> sd;                         // sample sd; 0 for one run
  ClassHistograms histograms;
};

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  require(n >= 2, "grid: need at least 2 points");
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  g.back() = hi;
  return g;
}

inline std::vector<double> percentile_grid(std::span<const double> column, const GridSpec& spec) {
  const auto sorted = tabular::observed_sorted(column);
  require(!sorted.empty(), "grid: feature has no observed values");
  return linspace(tabular::quantile_sorted(sorted, spec.lower_quantile),
                  tabular::quantile_sorted(sorted, spec.upper_quantile), spec.points);
}

inline const additive::PolyBranch& require_branch(const additive::AdditiveRiskModel& m, const std::string& feature) {
  const auto* b = m.find_poly(feature);
  require(b != nullptr, "feature '" + feature + "' has no polynomial branch in the model");
  return *b;
}

// w * p(normalized x) along the grid.
inline std::vector<double> contribution_curve(const additive::PolyBranch& b, std::span<const double> grid) {
  std::vector<double> c(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) c[i] = additive::branch_logodds(b, tabular::minmax_value(grid[i], b.range));
  return c;
}

inline std::vector<double> odds_factor(std::span<const double> contribution) {
  require(!contribution.empty(), "odds_factor: empty curve");
  const double lo = *std::min_element(contribution.begin(), contribution.end());
  std::vector<double> f(contribution.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::exp(contribution[i] - lo);
  return f;
}

inline RiskCurve risk_curve(std::span<const additive::AdditiveRiskModel> runs, const std::string& feature,
                            std::vector<double> grid) {
  require(!runs.empty(), "risk_curve: no models");
  require(!grid.empty() && std::is_sorted(grid.begin(), grid.end()), "risk_curve: grid must be ascending");
  RiskCurve rc;
  rc.feature = feature;
  rc.grid = std::move(grid);
  for (const auto& m : runs) {
    rc.contribution.push_back(contribution_curve(require_branch(m, feature), rc.grid));
    rc.odds_factor.push_back(odds_factor(rc.contribution.back()));
  }
  const std::size_t n = runs.size();
  rc.mean.assign(rc.grid.size(), 0.0);
  rc.sd.assign(rc.grid.size(), 0.0);
  for (std::size_t i = 0; i < rc.grid.size(); ++i) {
    for (const auto& f : rc.odds_factor) rc.mean[i] += f[i];
    rc.mean[i] /= static_cast<double>(n);
    if (n < 2) continue;
    double ss = 0.0;
    for (const auto& f : rc.odds_factor) ss += (f[i] - rc.mean[i]) * (f[i] - rc.mean[i]);
    rc.sd[i] = std::sqrt(ss / static_cast<double>(n - 1));
  }
  return rc;
}

// Grid over the cohort's [1st, 99th] percentiles plus class histograms.
inline RiskCurve risk_curve(std::span<const additive::AdditiveRiskModel> runs, const std::string& feature,
                            const tabular::Cohort& cohort, const GridSpec& spec = {}, std::size_t bins = 20) {
  const auto col = cohort.column(cohort.index_of(feature));
  RiskCurve rc = risk_curve(runs, feature, percentile_grid(col, spec));
  rc.histograms = class_histograms(col, cohort.labels, uniform_edges(rc.grid.front(), rc.grid.back(), bins));
  return rc;
}

// exp(w (p(x + dx) - p(x))) with x in original units; binary features give
// exp(w dx).
inline double large_change_odds(const additive::AdditiveRiskModel& m, const std::string& feature, double x, double dx) {
  require(std::isfinite(x) && std::isfinite(dx), "large_change_odds: non-finite input");
  if (const auto* bin = m.find_binary(feature)) return std::exp(bin->weight * dx);
  const auto& b = require_branch(m, feature);
  const double from = additive::branch_logodds(b, tabular::minmax_value(x, b.range));
  const double to = additive::branch_logodds(b, tabular::minmax_value(x + dx, b.range));
  return std::exp(to - from);
}

}  // namespace seprisk::interpret
