#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <vector>

#include "seprisk/tabular/cohort.hpp"
#include "seprisk/tabular/diastolic.hpp"
#include "seprisk/tabular/logistic.hpp"

namespace seprisk::tabular {

// One-vs-all logistic imputation of the ordinal diastolic column. Every other
// complete column is a predictor. Missing entries get
// the class with the highest one-vs-all probability; known entries stay.
// Returns the number of imputed cells.
inline std::size_t impute_diastolic(Cohort& cohort, std::size_t col, double ridge = 1e-3) {
  std::vector<std::size_t> known, unknown;
  for (std::size_t r = 0; r < cohort.rows(); ++r)
    (is_missing(cohort.at(r, col)) ? unknown : known).push_back(r);
  if (unknown.empty()) return 0;

  static constexpr std::array<double, 5> kClasses{-1.0, 0.0, 1.0, 2.0, 3.0};
  std::vector<double> present;
  for (double k : kClasses) {
    for (std::size_t r : known) {
      if (cohort.at(r, col) == k) {
        present.push_back(k);
        break;
      }
    }
  }
  require(present.size() >= 2, "impute_diastolic: need at least two classes among known rows");

  std::vector<std::size_t> predictors;
  for (std::size_t c = 0; c < cohort.cols(); ++c) {
    if (c == col) continue;
    bool complete = true;
    for (std::size_t r = 0; r < cohort.rows() && complete; ++r) complete = !is_missing(cohort.at(r, c));
    if (complete) predictors.push_back(c);
  }

  auto design = [&](const std::vector<std::size_t>& rows) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(predictors.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < predictors.size(); ++j) x(i, j) = cohort.at(rows[i], predictors[j]);
    return x;
  };
  Eigen::MatrixXd xk = design(known);
  Eigen::MatrixXd xu = design(unknown);
  // Standardise on the known rows so the penalty treats predictors alike.
  for (Eigen::Index j = 0; j < xk.cols(); ++j) {
    const double mean = xk.col(j).mean();
    const double sd = std::sqrt((xk.col(j).array() - mean).square().mean());
    const double scale = sd > 0 ? 1.0 / sd : 0.0;
    xk.col(j) = (xk.col(j).array() - mean) * scale;
    xu.col(j) = (xu.col(j).array() - mean) * scale;
  }

  std::vector<Eigen::VectorXd> models;
  for (double k : present) {
    Eigen::VectorXd y(static_cast<Eigen::Index>(known.size()));
    for (std::size_t i = 0; i < known.size(); ++i) y(i) = cohort.at(known[i], col) == k ? 1.0 : 0.0;
    models.push_back(fit_logistic(xk, y, ridge));
  }
  for (std::size_t i = 0; i < unknown.size(); ++i) {
    std::size_t best = 0;
    double best_score = -INFINITY;
    for (std::size_t m = 0; m < models.size(); ++m) {
      const double s = logistic_score(models[m], xu.row(i).transpose());
      if (s > best_score) {
        best_score = s;
        best = m;
      }
    }
    cohort.at(unknown[i], col) = present[best];
  }
  return unknown.size();
}

}  // namespace seprisk::tabular
