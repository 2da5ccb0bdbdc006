#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seprisk/math.hpp"
#include "seprisk/tabular/cohort.hpp"
#include "seprisk/tabular/normalize.hpp"

namespace seprisk::additive {

using tabular::FeatureKind;
using tabular::FeatureRange;
using tabular::Modality;

// [x, x^2, ..., x^D]; the constant term is carried by the model bias.
inline std::vector<double> poly_features(double x, std::size_t degree) {
  require(degree >= 1, "poly_features: degree must be >= 1");
  require(std::isfinite(x), "poly_features: non-finite input");
  std::vector<double> out(degree);
  double p = 1.0;
  for (std::size_t d = 0; d < degree; ++d) out[d] = p *= x;
  return out;
}

// sum_d a_d x^d, d = 1..D
inline double poly_value(std::span<const double> coeffs, double x) {
  double acc = 0.0;
  for (std::size_t d = coeffs.size(); d-- > 0;) acc = (acc + coeffs[d]) * x;
  return acc;
}

// Polynomial transform of one normalized feature with a non-negative fusion
// weight. Coefficients are kept at unit L2 norm by the trainer.
struct PolyBranch {
  std::string feature;
  Modality modality = Modality::cd;
  FeatureKind kind = FeatureKind::continuous;
  std::vector<double> coeffs;
  double weight = 0.0;
  FeatureRange range;  // training min/max in original units
};

struct BinaryBranch {
  std::string feature;
  Modality modality = Modality::cd;
  double weight = 0.0;
};

inline double branch_logodds(const PolyBranch& b, double x) { return b.weight * poly_value(b.coeffs, x); }

struct ModalityFlags {
  bool cd = true;
  bool edm = false;
  bool video = false;
  bool includes(Modality m) const { return m == Modality::cd ? cd : edm; }
  friend bool operator==(const ModalityFlags&, const ModalityFlags&) = default;
};

// Separable logistic risk model: sigmoid of the sum of per-feature branch
// contributions, binary terms, an optional video score term and a bias.
// Samples are laid out as [CD branches, EDM branches, binary branches],
// normalized with each branch's stored range (binary values stay 0/1).
struct AdditiveRiskModel {
  static constexpr int kVersion = 1;

  ModalityFlags modalities;
  std::size_t degree = 3;
  bool constrained = true;
  std::vector<PolyBranch> scalar_branches;
  std::vector<PolyBranch> edm_branches;
  std::vector<BinaryBranch> binary_branches;
  std::optional<double> video_weight;
  double bias = 0.0;

  std::size_t feature_count() const {
    return scalar_branches.size() + edm_branches.size() + binary_branches.size();
  }

  std::vector<std::string> feature_names() const {
    std::vector<std::string> names;
    for (const auto& b : scalar_branches) names.push_back(b.feature);
    for (const auto& b : edm_branches) names.push_back(b.feature);
    for (const auto& b : binary_branches) names.push_back(b.feature);
    return names;
  }

  // Visits every polynomial branch with its sample column.
  template <class F>
  void for_each_poly(F&& f) const {
    std::size_t col = 0;
    for (const auto& b : scalar_branches) f(b, col++);
    for (const auto& b : edm_branches) f(b, col++);
  }
  template <class F>
  void for_each_poly(F&& f) {
    std::size_t col = 0;
    for (auto& b : scalar_branches) f(b, col++);
    for (auto& b : edm_branches) f(b, col++);
  }

  const PolyBranch* find_poly(const std::string& name) const {
    for (const auto& b : scalar_branches)
      if (b.feature == name) return &b;
    for (const auto& b : edm_branches)
      if (b.feature == name) return &b;
    return nullptr;
  }
  PolyBranch* find_poly(const std::string& name) {
    return const_cast<PolyBranch*>(std::as_const(*this).find_poly(name));
  }
  const BinaryBranch* find_binary(const std::string& name) const {
    for (const auto& b : binary_branches)
      if (b.feature == name) return &b;
    return nullptr;
  }

  double min_fusion_weight() const {
    double m = video_weight.value_or(INFINITY);
    for_each_poly([&](const PolyBranch& b, std::size_t) { m = std::min(m, b.weight); });
    return m;
  }
};

inline double model_logodds(const AdditiveRiskModel& m, std::span<const double> sample,
                            std::optional<double> video_score = std::nullopt) {
  require(sample.size() == m.feature_count(), "model_logodds: sample has " + std::to_string(sample.size()) +
                                                  " values, model expects " + std::to_string(m.feature_count()));
  require(m.modalities.video == video_score.has_value(),
          m.modalities.video ? "model_logodds: video score required" : "model_logodds: model has no video branch");
  double z = m.bias;
  m.for_each_poly([&](const PolyBranch& b, std::size_t col) {
    require(!tabular::is_missing(sample[col]), "model_logodds: missing value for '" + b.feature + "'");
    z += branch_logodds(b, sample[col]);
  });
  const std::size_t off = m.scalar_branches.size() + m.edm_branches.size();
  for (std::size_t i = 0; i < m.binary_branches.size(); ++i) {
    require(!tabular::is_missing(sample[off + i]),
            "model_logodds: missing value for '" + m.binary_branches[i].feature + "'");
    z += m.binary_branches[i].weight * sample[off + i];
  }
  if (video_score) z += m.video_weight.value_or(0.0) * *video_score;
  return z;
}

inline double predict_risk(const AdditiveRiskModel& m, std::span<const double> sample,
                           std::optional<double> video_score = std::nullopt) {
  return sigmoid(model_logodds(m, sample, video_score));
}

// Builds an untrained model for the features of `specs` admitted by `flags`;
// ranges come from the (raw) training rows.
inline AdditiveRiskModel make_model(const tabular::Cohort& train, ModalityFlags flags, std::size_t degree) {
  require(degree >= 1, "make_model: degree must be >= 1");
  AdditiveRiskModel m;
  m.modalities = flags;
  m.degree = degree;
  for (std::size_t c = 0; c < train.cols(); ++c) {
    const auto& s = train.specs[c];
    if (!flags.includes(s.modality)) continue;
    if (s.kind == FeatureKind::binary) {
      m.binary_branches.push_back({s.name, s.modality, 0.0});
      continue;
    }
    PolyBranch b{s.name, s.modality, s.kind, std::vector<double>(degree, 0.0), 0.0,
                 tabular::fit_range(train.column(c))};
    (s.modality == Modality::cd ? m.scalar_branches : m.edm_branches).push_back(std::move(b));
  }
  if (flags.video) m.video_weight = 0.0;
  return m;
}

// Normalized design rows (model feature order) for a raw cohort.
inline std::vector<double> design_matrix(const AdditiveRiskModel& m, const tabular::Cohort& cohort) {
  std::vector<std::size_t> cols;
  std::vector<const FeatureRange*> ranges;
  auto locate = [&](const std::string& name, Modality modality) {
    auto idx = cohort.find(name);
    require(idx.has_value(), "model feature '" + name + "' is not present in the cohort");
    require(cohort.specs[*idx].modality == modality,
            "model feature '" + name + "' has a different modality in the cohort");
    return *idx;
  };
  m.for_each_poly([&](const PolyBranch& b, std::size_t) {
    cols.push_back(locate(b.feature, b.modality));
    ranges.push_back(&b.range);
  });
  for (const auto& b : m.binary_branches) {
    cols.push_back(locate(b.feature, b.modality));
    ranges.push_back(nullptr);
  }
  std::vector<double> x(cohort.rows() * cols.size());
  for (std::size_t r = 0; r < cohort.rows(); ++r) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const double v = cohort.at(r, cols[j]);
      require(!tabular::is_missing(v), "design_matrix: missing value for '" + cohort.specs[cols[j]].name +
                                           "' in row " + std::to_string(r) + " (impute first)");
      x[r * cols.size() + j] = ranges[j] ? tabular::minmax_value(v, *ranges[j]) : v;
    }
  }
  return x;
}

}  // namespace seprisk::additive
