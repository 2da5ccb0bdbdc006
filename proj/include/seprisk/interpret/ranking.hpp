#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "seprisk/additive/model.hpp"

namespace seprisk::interpret {

struct RankedFeature {
  std::string feature;
  double weight = 0.0;
  std::string modality;  // "CD", "EDM" or "Video"
};

using FeatureRanking = std::vector<RankedFeature>;

inline std::string modality_tag(tabular::Modality m) { return m == tabular::Modality::edm ? "EDM" : "CD"; }

// Descending by weight; equal weights fall back to name order.
inline FeatureRanking rank_weights(FeatureRanking entries) {
  std::sort(entries.begin(), entries.end(), [](const RankedFeature& a, const RankedFeature& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.feature < b.feature;
  });
  return entries;
}

// Fusion weights of one model; binary branches enter by |w|.
inline FeatureRanking model_weights(const additive::AdditiveRiskModel& m) {
  FeatureRanking out;
  m.for_each_poly([&](const additive::PolyBranch& b, std::size_t) {
    out.push_back({b.feature, b.weight, modality_tag(b.modality)});
  });
  for (const auto& b : m.binary_branches) out.push_back({b.feature, std::abs(b.weight), modality_tag(b.modality)});
  if (m.video_weight) out.push_back({"video", *m.video_weight, "Video"});
  require(!out.empty(), "rank_features: model has no branches");
  return out;
}

inline FeatureRanking rank_features(const additive::AdditiveRiskModel& m) { return rank_weights(model_weights(m)); }

// Ranks by the mean weight over runs; all runs must share one feature set.
inline FeatureRanking rank_features(std::span<const additive::AdditiveRiskModel> runs) {
  require(!runs.empty(), "rank_features: no models");
  FeatureRanking mean = model_weights(runs[0]);
  for (std::size_t r = 1; r < runs.size(); ++r) {
    const FeatureRanking w = model_weights(runs[r]);
    require(w.size() == mean.size(), "rank_features: runs have different feature sets");
    for (std::size_t i = 0; i < w.size(); ++i) {
      require(w[i].feature == mean[i].feature, "rank_features: runs have different feature sets");
      mean[i].weight += w[i].weight;
    }
  }
  for (auto& e : mean) e.weight /= static_cast<double>(runs.size());
  return rank_weights(std::move(mean));
}

}  // namespace seprisk::interpret
