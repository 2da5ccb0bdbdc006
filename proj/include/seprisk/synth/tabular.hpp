#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "seprisk/math.hpp"
#include "seprisk/random.hpp"
#include "seprisk/tabular/cohort.hpp"
#include "seprisk/tabular/time.hpp"

namespace seprisk::synth {

using tabular::FeatureKind;
using tabular::Modality;

enum class Effect { null, linear, quadratic, cubic, sigmoid };
enum class Distribution { uniform, gaussian };

inline std::string to_string(Effect e) {
  switch (e) {
    case Effect::linear: return "linear";
    case Effect::quadratic: return "quadratic";
    case Effect::cubic: return "cubic";
    case Effect::sigmoid: return "sigmoid";
    case Effect::null: break;
  }
  return "null";
}

inline Effect parse_effect(const std::string& s) {
  if (s == "null") return Effect::null;
  if (s == "linear") return Effect::linear;
  if (s == "quadratic") return Effect::quadratic;
  if (s == "cubic") return Effect::cubic;
  if (s == "sigmoid") return Effect::sigmoid;
  throw ValidationError("unknown effect '" + s + "'");
}

// One generated feature. The latent draw u (uniform[-1,1] or N(0,1), or
// Bernoulli(0.5) for binary features) is stored as offset + scale * u.
struct FeatureGen {
  std::string name;
  Effect effect = Effect::null;
  double strength = 0.0;
  Distribution distribution = Distribution::uniform;
  Modality modality = Modality::cd;
  FeatureKind kind = FeatureKind::continuous;
  double offset = 0.0;
  double scale = 1.0;
};

struct GeneratorSpec {
  std::vector<FeatureGen> features;
  double bias = 0.0;
};

// True log-odds contribution on the latent scale. Polynomial effects stay
// inside the degree-3 model class; the sigmoid effect is an out-of-class
// stress case.
inline double latent_effect(Effect e, double strength, double u) {
  switch (e) {
    case Effect::linear: return strength * u;
    case Effect::quadratic: return strength * (u * u - 1.0 / 3.0);
    case Effect::cubic: return strength * 0.5 * (u * u * u + u);
    case Effect::sigmoid: return strength * (2.0 * sigmoid(4.0 * u) - 1.0);
    case Effect::null: break;
  }
  return 0.0;
}

// Contribution in the feature's stored units.
inline double true_effect(const FeatureGen& f, double x) {
  return latent_effect(f.effect, f.strength, (x - f.offset) / f.scale);
}

struct SyntheticCohort {
  tabular::Cohort cohort;
  std::vector<double> true_logodds;
  std::vector<double> true_prob;
};

inline std::vector<tabular::FeatureSpec> feature_specs(const GeneratorSpec& spec) {
  std::vector<tabular::FeatureSpec> out;
  for (const FeatureGen& f : spec.features) out.push_back({f.name, f.kind, f.modality, std::nullopt});
  return out;
}

// i.i.d. rows; label ~ Bernoulli(sigmoid(bias + sum_i f_i(x_i) + extra_i)).
// `extra_logodds`, when non-empty, adds a per-row term (the video latent).
inline SyntheticCohort gen_tabular(const GeneratorSpec& spec, std::size_t n, std::uint64_t seed,
                                   std::span<const double> extra_logodds = {}) {
  require(n >= 1, "gen_tabular: need n >= 1");
  require(extra_logodds.empty() || extra_logodds.size() == n, "gen_tabular: extra log-odds length mismatch");
  Rng rng(seed);
  SyntheticCohort out;
  tabular::Cohort& c = out.cohort;
  c.specs = feature_specs(spec);
  tabular::validate_specs(c.specs);
  const std::size_t p = spec.features.size();
  c.values.resize(n * p);
  const std::int64_t base_day = tabular::days_from_civil(2010, 1, 1);
  for (std::size_t i = 0; i < n; ++i) {
    double z = spec.bias;
    for (std::size_t j = 0; j < p; ++j) {
      const FeatureGen& f = spec.features[j];
      double u = 0.0;
      if (f.kind == FeatureKind::binary) u = rng.bernoulli(0.5) ? 1.0 : 0.0;
      else if (f.distribution == Distribution::gaussian) u = rng.normal();
      else u = rng.uniform(-1.0, 1.0);
      const double x = f.kind == FeatureKind::binary ? u : f.offset + f.scale * u;
      c.values[i * p + j] = x;
      z += f.kind == FeatureKind::binary ? f.strength * u : latent_effect(f.effect, f.strength, u);
    }
    if (!extra_logodds.empty()) z += extra_logodds[i];
    const double prob = sigmoid(z);
    out.true_logodds.push_back(z);
    out.true_prob.push_back(prob);
    c.labels.push_back(rng.bernoulli(prob) ? 1 : 0);
    c.patient_ids.push_back("P" + std::to_string(i + 1));
    c.study_times.push_back(tabular::format_date(base_day + static_cast<std::int64_t>(i % 3000)));
  }
  return out;
}

// Default recovery benchmark: 8 signal-bearing and 8 null features, all CD.
inline GeneratorSpec recovery_spec(double bias = 0.0) {
  GeneratorSpec s;
  s.bias = bias;
  const Effect effects[8] = {Effect::linear, Effect::linear,    Effect::quadratic, Effect::cubic,
                             Effect::linear, Effect::quadratic, Effect::cubic,     Effect::linear};
  const double strengths[8] = {1.6, -1.3, 1.5, 1.4, 1.0, -1.2, -1.1, 0.9};
  for (int i = 0; i < 8; ++i) {
    FeatureGen f;
    f.name = "signal_" + std::to_string(i + 1);
    f.effect = effects[i];
    f.strength = strengths[i];
    f.offset = 50.0 + 10.0 * i;
    f.scale = 5.0 + i;
    s.features.push_back(f);
  }
  for (int i = 0; i < 8; ++i) {
    FeatureGen f;
    f.name = "null_" + std::to_string(i + 1);
    f.distribution = i % 2 ? Distribution::gaussian : Distribution::uniform;
    f.offset = 10.0 * i;
    f.scale = 2.0;
    s.features.push_back(f);
  }
  return s;
}

// CD and EDM features with independent signal, plus binary CD features.
inline GeneratorSpec multimodal_spec(double bias = -1.2) {
  GeneratorSpec s;
  s.bias = bias;
  auto add = [&](std::string name, Effect e, double strength, Modality m, double offset, double scale) {
    FeatureGen f;
    f.name = std::move(name);
    f.effect = e;
    f.strength = strength;
    f.modality = m;
    f.offset = offset;
    f.scale = scale;
    s.features.push_back(f);
  };
  add("age", Effect::linear, 1.6, Modality::cd, 64.0, 20.0);
  add("heart_rate", Effect::cubic, 1.2, Modality::cd, 75.0, 20.0);
  add("weight", Effect::quadratic, 1.0, Modality::cd, 80.0, 25.0);
  add("diastolic_pressure", Effect::linear, -0.8, Modality::cd, 70.0, 15.0);
  add("ldl", Effect::null, 0.0, Modality::cd, 90.0, 30.0);
  add("trmv", Effect::linear, 1.4, Modality::edm, 280.0, 60.0);
  add("ejection_fraction", Effect::quadratic, 1.3, Modality::edm, 55.0, 20.0);
  add("lvidd", Effect::null, 0.0, Modality::edm, 4.8, 0.8);
  add("es_volume", Effect::cubic, 1.0, Modality::edm, 50.0, 25.0);
  FeatureGen sex;
  sex.name = "sex_male";
  sex.kind = FeatureKind::binary;
  sex.strength = -0.3;
  s.features.push_back(sex);
  FeatureGen smoker;
  smoker.name = "smoker";
  smoker.kind = FeatureKind::binary;
  smoker.strength = 0.4;
  s.features.push_back(smoker);
  return s;
}

}  // namespace seprisk::synth
