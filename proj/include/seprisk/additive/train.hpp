#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "seprisk/additive/model.hpp"
#include "seprisk/nn/loss.hpp"
#include "seprisk/nn/rmsprop.hpp"
#include "seprisk/random.hpp"
#include "seprisk/train_config.hpp"

namespace seprisk::additive {

// Normalized design rows plus labels and (optionally) video scores.
struct Dataset {
  std::vector<double> x;
  std::size_t cols = 0;
  std::vector<int> labels;
  std::vector<double> video;

  std::size_t rows() const { return labels.size(); }
  std::span<const double> row(std::size_t r) const { return {x.data() + r * cols, cols}; }
  std::optional<double> video_score(std::size_t r) const {
    if (video.empty()) return std::nullopt;
    return video[r];
  }
};

inline Dataset make_dataset(const AdditiveRiskModel& m, const tabular::Cohort& cohort,
                            std::span<const double> video_scores = {}) {
  require(m.modalities.video == !video_scores.empty(),
          m.modalities.video ? "model includes video but no video scores were given"
                             : "video scores given to a model without a video branch");
  require(video_scores.empty() || video_scores.size() == cohort.rows(), "video score count does not match cohort rows");
  Dataset d;
  d.x = design_matrix(m, cohort);
  d.cols = m.feature_count();
  d.labels = cohort.labels;
  d.video.assign(video_scores.begin(), video_scores.end());
  return d;
}

inline std::vector<double> predict_logodds(const AdditiveRiskModel& m, const Dataset& d) {
  std::vector<double> z(d.rows());
  for (std::size_t r = 0; r < d.rows(); ++r) z[r] = model_logodds(m, d.row(r), d.video_score(r));
  return z;
}

inline std::vector<double> predict_risk(const AdditiveRiskModel& m, const Dataset& d) {
  auto z = predict_logodds(m, d);
  for (double& v : z) v = sigmoid(v);
  return z;
}

// Flat parameter layout: per polynomial branch [a_1..a_D, w], then binary
// weights, then w_V, then the bias.
inline std::vector<double> pack(const AdditiveRiskModel& m) {
  std::vector<double> p;
  m.for_each_poly([&](const PolyBranch& b, std::size_t) {
    p.insert(p.end(), b.coeffs.begin(), b.coeffs.end());
    p.push_back(b.weight);
  });
  for (const auto& b : m.binary_branches) p.push_back(b.weight);
  if (m.video_weight) p.push_back(*m.video_weight);
  p.push_back(m.bias);
  return p;
}

inline void unpack(std::span<const double> p, AdditiveRiskModel& m) {
  std::size_t k = 0;
  m.for_each_poly([&](PolyBranch& b, std::size_t) {
    for (double& a : b.coeffs) a = p[k++];
    b.weight = p[k++];
  });
  for (auto& b : m.binary_branches) b.weight = p[k++];
  if (m.video_weight) m.video_weight = p[k++];
  m.bias = p[k++];
  require(k == p.size(), "unpack: parameter count mismatch");
}

// Accumulates dL/dtheta for sample r into `grad` (pack layout), given dL/dz.
inline void accumulate_gradient(const AdditiveRiskModel& m, const Dataset& d, std::size_t r, double dz,
                                std::vector<double>& grad) {
  const auto x = d.row(r);
  std::size_t k = 0;
  m.for_each_poly([&](const PolyBranch& b, std::size_t col) {
    double xp = 1.0, poly = 0.0;
    for (std::size_t j = 0; j < b.coeffs.size(); ++j) {
      xp *= x[col];
      grad[k++] += dz * b.weight * xp;
      poly += b.coeffs[j] * xp;
    }
    grad[k++] += dz * poly;
  });
  const std::size_t off = m.scalar_branches.size() + m.edm_branches.size();
  for (std::size_t i = 0; i < m.binary_branches.size(); ++i) grad[k++] += dz * x[off + i];
  if (m.video_weight) grad[k++] += dz * d.video[r];
  grad[k] += dz;
}

// Folds each coefficient norm into its weight, then makes fusion weights
// non-negative.
inline void project(AdditiveRiskModel& m, Projection mode = Projection::reflect) {
  m.for_each_poly([mode](PolyBranch& b, std::size_t) {
    double n = 0.0;
    for (double a : b.coeffs) n += a * a;
    n = std::sqrt(n);
    if (n > 0.0) {
      for (double& a : b.coeffs) a /= n;
      b.weight *= n;
    }
    if (b.weight >= 0.0) return;
    if (mode == Projection::clip) {
      b.weight = 0.0;
    } else {
      b.weight = -b.weight;
      for (double& a : b.coeffs) a = -a;
    }
  });
  if (m.video_weight) m.video_weight = std::max(*m.video_weight, 0.0);
}

// Random unit-norm coefficients, fusion weights 0.1, bias at the training log-odds.
inline void initialize(AdditiveRiskModel& m, std::span<const int> train_labels, std::uint64_t seed) {
  require(!train_labels.empty(), "initialize: empty training set");
  const double pos = static_cast<double>(std::count(train_labels.begin(), train_labels.end(), 1));
  const double prevalence = pos / static_cast<double>(train_labels.size());
  require(prevalence > 0.0 && prevalence < 1.0, "initialize: training labels contain a single class");
  Rng rng(seed);
  m.for_each_poly([&](PolyBranch& b, std::size_t) {
    b.coeffs.assign(m.degree, 0.0);
    double n = 0.0;
    while (n == 0.0) {
      n = 0.0;
      for (double& a : b.coeffs) {
        a = rng.uniform(-0.1, 0.1);
        n += a * a;
      }
    }
    for (double& a : b.coeffs) a /= std::sqrt(n);
    b.weight = 0.1;
  });
  for (auto& b : m.binary_branches) b.weight = 0.0;
  if (m.video_weight) m.video_weight = 0.1;
  m.bias = logit(prevalence);
}

inline double dataset_loss(const AdditiveRiskModel& m, const Dataset& d, const nn::ClassWeights& cw) {
  return nn::weighted_bce(predict_risk(m, d), d.labels, cw);
}

struct TrainResult {
  AdditiveRiskModel model;
  LossHistory history;
  double min_fusion_weight = std::numeric_limits<double>::infinity();  // over every post-step state
  std::size_t steps = 0;
};

// Mini-batch RMSProp on class-weighted BCE with post-step projection (when
// cfg.constrained) and early stopping on validation loss. `model` must
// already be initialized.
inline TrainResult train(const AdditiveRiskModel& model, const Dataset& train_set, const Dataset& validation,
                         const TrainConfig& cfg) {
  cfg.validate();
  require(train_set.rows() > 0, "train: empty training set");
  require(validation.rows() > 0, "train: empty validation set");
  require(train_set.cols == model.feature_count() && validation.cols == model.feature_count(),
          "train: dataset columns do not match the model");
  const nn::ClassWeights cw = nn::balanced_class_weights(train_set.labels);

  TrainResult out;
  out.model = model;
  if (cfg.max_epochs == 0) return out;

  AdditiveRiskModel current = model;
  std::vector<double> theta = pack(current);
  std::vector<double> accum(theta.size(), 0.0);
  std::vector<double> grad(theta.size());
  std::vector<std::size_t> order(train_set.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(cfg.seed, 0x5eed));

  double best = dataset_loss(current, validation, cw);
  std::size_t stale = 0;
  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0, weight_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      double wsum = 0.0;
      for (std::size_t i = start; i < end; ++i) wsum += cw(train_set.labels[order[i]]);
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t i = start; i < end; ++i) {
        const std::size_t r = order[i];
        const int y = train_set.labels[r];
        const double p = sigmoid(model_logodds(current, train_set.row(r), train_set.video_score(r)));
        const double w = cw(y);
        loss_sum -= w * (y ? std::log(std::max(p, nn::kLogClamp)) : std::log(std::max(1.0 - p, nn::kLogClamp)));
        weight_sum += w;
        accumulate_gradient(current, train_set, r, w * (p - y) / wsum, grad);
      }
      nn::rmsprop_step(theta, grad, accum, cfg.optimizer);
      unpack(theta, current);
      if (cfg.constrained) {
        project(current, cfg.projection);
        theta = pack(current);
      }
      out.min_fusion_weight = std::min(out.min_fusion_weight, current.min_fusion_weight());
      ++out.steps;
    }
    const double val = dataset_loss(current, validation, cw);
    out.history.train.push_back(loss_sum / weight_sum);
    out.history.validation.push_back(val);
    if (val < best) {
      best = val;
      stale = 0;
      out.model = current;
      out.history.best_epoch = epoch;
    } else if (++stale >= cfg.patience) {
      break;
    }
  }
  return out;
}

}  // namespace seprisk::additive
