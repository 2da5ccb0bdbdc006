#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "seprisk/tabular/cohort.hpp"

namespace seprisk::tabular {

struct MiceConfig {
  std::size_t iterations = 10;
  std::uint64_t seed = 0;
};

struct MiceResult {
  Eigen::MatrixXd completed;
  std::size_t filled = 0;
};

// Chained-equation imputation: missing cells start at their column mean;
// each sweep regresses every incomplete column (ascending missing rate) on
// all other columns by least squares over the rows where it was observed,
// and overwrites its missing cells with the predictions. Observed cells are
// never written. The procedure draws no random numbers; the seed is kept so
// callers can record it alongside the result.
inline MiceResult mice_impute(const Eigen::MatrixXd& data, const MiceConfig& cfg = {}) {
  const Eigen::Index n = data.rows(), p = data.cols();
  MiceResult out{data, 0};
  std::vector<std::vector<Eigen::Index>> missing(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) {
    double sum = 0.0;
    Eigen::Index observed = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (is_missing(data(i, j))) missing[j].push_back(i);
      else {
        sum += data(i, j);
        ++observed;
      }
    }
    if (!missing[j].empty()) {
      require(observed > 0, "mice: column " + std::to_string(j) + " has no observed values");
      const double mean = sum / static_cast<double>(observed);
      for (Eigen::Index i : missing[j]) out.completed(i, j) = mean;
      out.filled += missing[j].size();
    }
  }
  std::vector<Eigen::Index> order;
  for (Eigen::Index j = 0; j < p; ++j)
    if (!missing[j].empty()) order.push_back(j);
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return missing[a].size() < missing[b].size(); });
  if (order.empty() || p < 2) return out;

  for (std::size_t sweep = 0; sweep < cfg.iterations; ++sweep) {
    for (Eigen::Index j : order) {
      const auto& miss = missing[j];
      std::vector<char> is_miss(static_cast<std::size_t>(n), 0);
      for (Eigen::Index i : miss) is_miss[i] = 1;
      const Eigen::Index n_obs = n - static_cast<Eigen::Index>(miss.size());
      Eigen::MatrixXd x(n_obs, p);  // intercept + other columns
      Eigen::VectorXd y(n_obs);
      Eigen::Index r = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (is_miss[i]) continue;
        x(r, 0) = 1.0;
        for (Eigen::Index k = 0, c = 1; k < p; ++k)
          if (k != j) x(r, c++) = out.completed(i, k);
        y(r++) = out.completed(i, j);
      }
      const Eigen::VectorXd beta = x.colPivHouseholderQr().solve(y);
      for (Eigen::Index i : miss) {
        double pred = beta(0);
        for (Eigen::Index k = 0, c = 1; k < p; ++k)
          if (k != j) pred += beta(c++) * out.completed(i, k);
        out.completed(i, j) = pred;
      }
    }
  }
  return out;
}

}  // namespace seprisk::tabular
