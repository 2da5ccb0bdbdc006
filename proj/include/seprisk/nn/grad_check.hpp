#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "seprisk/nn/tensor.hpp"

namespace seprisk::nn {

constexpr double kGradCheckStep = 1e-5;

inline double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / denom;
}

// Central-difference check of `analytic` = d loss / d theta. `loss` is
// re-evaluated after perturbing theta in place; theta is restored on exit.
// Returns the max relative error over all entries.
template <class LossFn>
double grad_check(LossFn&& loss, std::span<double> theta, std::span<const double> analytic,
                  double step = kGradCheckStep) {
  require(theta.size() == analytic.size(), "grad_check: gradient length mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double saved = theta[i];
    theta[i] = saved + step;
    const double up = loss();
    theta[i] = saved - step;
    const double down = loss();
    theta[i] = saved;
    if (!std::isfinite(up) || !std::isfinite(down))
      throw std::runtime_error("grad_check: non-finite forward output");
    worst = std::max(worst, relative_error(analytic[i], (up - down) / (2.0 * step)));
  }
  return worst;
}

// Checks every trainable buffer. The analytic gradients must already sit in
// each Param::grad; they are copied before probing since `loss` may not touch them.
template <class LossFn>
double grad_check(LossFn&& loss, const std::vector<Param*>& params, double step = kGradCheckStep) {
  double worst = 0.0;
  for (Param* p : params) {
    if (!p->trainable) continue;
    const std::vector<double> analytic = p->grad;
    worst = std::max(worst, grad_check(loss, std::span<double>(p->value), analytic, step));
  }
  return worst;
}

}  // namespace seprisk::nn
