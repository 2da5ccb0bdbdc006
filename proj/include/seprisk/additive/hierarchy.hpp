#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "seprisk/additive/train.hpp"

namespace seprisk::additive {

// Named modality subsets of the fusion hierarchy.
struct AdditiveConfig {
  std::string name;
  ModalityFlags flags;
};

inline const std::vector<AdditiveConfig>& hierarchy_configs() {
  static const std::vector<AdditiveConfig> configs = {
      {"cd", {true, false, false}},
      {"edm", {false, true, false}},
      {"cd_edm", {true, true, false}},
      {"all", {true, true, true}},
  };
  return configs;
}

inline ModalityFlags config_flags(const std::string& name) {
  for (const auto& c : hierarchy_configs())
    if (c.name == name) return c.flags;
  throw ValidationError("unknown model configuration '" + name + "'");
}

// Builds, initializes and trains one model on raw (imputed, unnormalized)
// cohorts. Video scores are only used when flags.video is set.
inline TrainResult fit_additive(ModalityFlags flags, const tabular::Cohort& train_rows,
                                const tabular::Cohort& validation_rows, std::span<const double> video_train,
                                std::span<const double> video_validation, const TrainConfig& cfg) {
  cfg.validate();
  require(train_rows.rows() > 0, "fit: empty training set");
  AdditiveRiskModel m = make_model(train_rows, flags, cfg.degree);
  require(m.feature_count() > 0 || flags.video, "fit: no features for the selected modalities");
  m.constrained = cfg.constrained;
  initialize(m, train_rows.labels, derive_seed(cfg.seed, 1));
  const auto vt = flags.video ? video_train : std::span<const double>{};
  const auto vv = flags.video ? video_validation : std::span<const double>{};
  return train(m, make_dataset(m, train_rows, vt), make_dataset(m, validation_rows, vv), cfg);
}

// Trains m_s, m_v, m_sv and (when video scores are given) m_sV independently
// on the same rows.
inline std::vector<std::pair<std::string, TrainResult>> fuse_hierarchy(
    const tabular::Cohort& train_rows, const tabular::Cohort& validation_rows,
    std::span<const double> video_train, std::span<const double> video_validation, const TrainConfig& cfg) {
  std::vector<std::pair<std::string, TrainResult>> out;
  for (const auto& c : hierarchy_configs()) {
    if (c.flags.video && video_train.empty()) continue;
    out.emplace_back(c.name, fit_additive(c.flags, train_rows, validation_rows, video_train, video_validation, cfg));
  }
  return out;
}

}  // namespace seprisk::additive
