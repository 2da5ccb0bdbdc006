#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "seprisk/error.hpp"

namespace seprisk::nn {

// Per-class sample weights; each class contributes half of the total weight.
struct ClassWeights {
  double negative = 1.0;
  double positive = 1.0;
  double operator()(int label) const { return label ? positive : negative; }
};

inline ClassWeights balanced_class_weights(std::span<const int> labels) {
  require(!labels.empty(), "class weights: empty label set");
  const double n = static_cast<double>(labels.size());
  const double pos = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
  const double neg = n - pos;
  require(pos > 0 && neg > 0, "class weights: labels contain a single class");
  return {n / (2.0 * neg), n / (2.0 * pos)};
}

constexpr double kLogClamp = 1e-12;

// Weighted mean of -[y log p + (1-y) log(1-p)], log arguments clamped at 1e-12.
inline double weighted_bce(std::span<const double> predictions, std::span<const int> labels,
                           const ClassWeights& weights) {
  require(!predictions.empty(), "weighted_bce: empty input");
  require(predictions.size() == labels.size(), "weighted_bce: prediction/label length mismatch");
  double total = 0.0, wsum = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double p = predictions[i];
    const double w = weights(labels[i]);
    const double term = labels[i] ? std::log(std::max(p, kLogClamp))
                                   : std::log(std::max(1.0 - p, kLogClamp));
    total -= w * term;
    wsum += w;
  }
  return total / wsum;
}

// dL/dz for each logit z_i with p_i = sigmoid(z_i), unclamped.
inline std::vector<double> weighted_bce_logit_grad(std::span<const double> predictions,
                                                   std::span<const int> labels,
                                                   const ClassWeights& weights) {
  double wsum = 0.0;
  for (int y : labels) wsum += weights(y);
  std::vector<double> g(predictions.size());
  for (std::size_t i = 0; i < predictions.size(); ++i)
    g[i] = weights(labels[i]) * (predictions[i] - labels[i]) / wsum;
  return g;
}

}  // namespace seprisk::nn
