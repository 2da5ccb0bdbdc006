#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "seprisk/math.hpp"

namespace seprisk::tabular {

// Binary logistic regression by Newton/IRLS with an L2 penalty on the
// slopes (never on the intercept). Returns [intercept, slopes...].
inline Eigen::VectorXd fit_logistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                    double ridge = 1e-6, int max_iter = 50) {
  const Eigen::Index n = x.rows(), p = x.cols();
  Eigen::MatrixXd design(n, p + 1);
  design.col(0).setOnes();
  design.rightCols(p) = x;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p + 1);
  Eigen::MatrixXd penalty = Eigen::MatrixXd::Identity(p + 1, p + 1) * ridge;
  penalty(0, 0) = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd eta = design * beta;
    Eigen::VectorXd mu(n), w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      mu(i) = sigmoid(eta(i));
      w(i) = std::max(mu(i) * (1.0 - mu(i)), 1e-12);
    }
    const Eigen::VectorXd grad = design.transpose() * (y - mu) - penalty * beta;
    const Eigen::MatrixXd hess = design.transpose() * w.asDiagonal() * design + penalty;
    const Eigen::VectorXd step = hess.ldlt().solve(grad);
    beta += step;
    if (step.lpNorm<Eigen::Infinity>() < 1e-10) break;
  }
  return beta;
}

inline double logistic_score(const Eigen::VectorXd& beta, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return beta(0) + beta.tail(beta.size() - 1).dot(x);
}

}  // namespace seprisk::tabular
