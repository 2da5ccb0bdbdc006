#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "seprisk/additive/hierarchy.hpp"
#include "seprisk/additive/serialize.hpp"
#include "seprisk/eval/auc.hpp"
#include "seprisk/eval/ttest.hpp"
#include "seprisk/interpret/ranking.hpp"
#include "seprisk/tabular/split.hpp"
#include "seprisk/video/train.hpp"

namespace seprisk::eval {

inline const std::vector<std::string>& model_order() {
  static const std::vector<std::string> order = {"cd", "edm", "video", "cd_edm", "all"};
  return order;
}

inline std::string model_label(const std::string& name) {
  if (name == "cd") return "CD";
  if (name == "edm") return "EDM";
  if (name == "video") return "Video";
  if (name == "cd_edm") return "CD+EDM";
  if (name == "all") return "All 3";
  return name;
}

// The five planned comparisons (a vs b).
inline const std::vector<std::pair<std::string, std::string>>& comparison_pairs() {
  static const std::vector<std::pair<std::string, std::string>> pairs = {
      {"cd", "edm"}, {"cd", "video"}, {"edm", "video"}, {"cd", "cd_edm"}, {"cd_edm", "all"}};
  return pairs;
}

struct ExperimentConfig {
  std::size_t runs = 5;
  std::vector<std::string> models = {"cd", "edm", "cd_edm"};
  bool logistic_baseline = true;  // degree-1 unconstrained fits for cd, edm, cd_edm
  TrainConfig additive;
  TrainConfig video = [] {
    TrainConfig c;
    c.max_epochs = 50;
    c.batch_size = 16;
    return c;
  }();
  video::VideoNetConfig net = video::VideoNetConfig::desk();
  tabular::SplitConfig split;
  std::uint64_t seed = 0;
  double alpha = kAlpha;

  bool wants(const std::string& name) const { return std::find(models.begin(), models.end(), name) != models.end(); }
  bool needs_video() const { return wants("video") || wants("all"); }

  void validate() const {
    require(runs >= 1, "experiment: runs must be >= 1");
    require(!models.empty(), "experiment: no models selected");
    for (const auto& m : models)
      require(std::find(model_order().begin(), model_order().end(), m) != model_order().end(),
              "experiment: unknown model '" + m + "'");
    additive.validate();
    if (needs_video()) {
      video.validate();
      net.validate();
    }
  }
};

struct ModelRun {
  std::string name;
  double auc = 0.0;
  LossHistory history;
  std::optional<additive::AdditiveRiskModel> model;  // absent for the video net
  double min_fusion_weight = INFINITY;
};

struct RunReport {
  std::size_t run_id = 0;  // 1-based
  std::uint64_t seed = 0;
  tabular::Split split;
  std::vector<ModelRun> models;     // in model_order()
  std::vector<ModelRun> logistic;   // baseline fits
  std::optional<video::VideoNet> video_net;

  const ModelRun* find(const std::string& name) const {
    for (const auto& m : models)
      if (m.name == name) return &m;
    return nullptr;
  }
};

struct ExperimentReport {
  std::vector<RunReport> runs;
  std::vector<ComparisonResult> comparisons;

  std::vector<double> aucs(const std::string& name, bool logistic = false) const {
    std::vector<double> out;
    for (const auto& r : runs)
      for (const auto& m : logistic ? r.logistic : r.models)
        if (m.name == name) out.push_back(m.auc);
    return out;
  }
};

inline double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline double sd_of(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

inline std::vector<tabular::Cohort> split_rows(const tabular::Cohort& c, const tabular::Split& s) {
  return {c.subset(s.train), c.subset(s.validation), c.subset(s.test)};
}

template <class T>
std::vector<T> pick(std::span<const T> v, std::span<const std::size_t> idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(v[i]);
  return out;
}

// One run: shared split, optional video net, then every selected additive
// model. `clips[i]` belongs to cohort row i.
inline RunReport run_once(const tabular::Cohort& cohort, std::span<const nn::Tensor> clips,
                          const ExperimentConfig& cfg, std::size_t run_id) {
  RunReport rep;
  rep.run_id = run_id;
  rep.seed = derive_seed(cfg.seed, run_id);
  rep.split = tabular::split_cohort(cohort.labels, rep.seed, cfg.split);
  const auto parts = split_rows(cohort, rep.split);
  const auto& [train_rows, val_rows, test_rows] = std::tie(parts[0], parts[1], parts[2]);

  std::vector<double> z_train, z_val, z_test;
  if (cfg.needs_video()) {
    require(clips.size() == cohort.rows(), "experiment: need one clip per cohort row");
    const auto c_train = pick(clips, std::span<const std::size_t>(rep.split.train));
    const auto c_val = pick(clips, std::span<const std::size_t>(rep.split.validation));
    const auto c_test = pick(clips, std::span<const std::size_t>(rep.split.test));
    video::VideoNet net(cfg.net);
    net.init(derive_seed(rep.seed, 2));
    TrainConfig vc = cfg.video;
    vc.seed = derive_seed(rep.seed, 3);
    ModelRun mr{"video", 0.0, video::train_video(net, {c_train, train_rows.labels}, {c_val, val_rows.labels}, vc), {}, INFINITY};
    z_train = net.score_all(c_train);
    z_val = net.score_all(c_val);
    z_test = net.score_all(c_test);
    mr.auc = auc(z_test, test_rows.labels);
    if (cfg.wants("video")) rep.models.push_back(std::move(mr));
    rep.video_net = std::move(net);
  }

  TrainConfig ac = cfg.additive;
  ac.seed = derive_seed(rep.seed, 4);
  auto fit = [&](const std::string& name, const TrainConfig& tc) {
    const auto flags = additive::config_flags(name);
    auto res = additive::fit_additive(flags, train_rows, val_rows, z_train, z_val, tc);
    const auto test = additive::make_dataset(res.model, test_rows, flags.video ? std::span<const double>(z_test)
                                                                               : std::span<const double>{});
    return ModelRun{name, auc(additive::predict_risk(res.model, test), test_rows.labels), std::move(res.history),
                    std::move(res.model), res.min_fusion_weight};
  };
  for (const auto& name : model_order()) {
    if (name == "video" || !cfg.wants(name)) continue;
    rep.models.push_back(fit(name, ac));
    if (cfg.logistic_baseline && name != "all") {
      TrainConfig lc = ac;
      lc.degree = 1;
      lc.constrained = false;
      rep.logistic.push_back(fit(name, lc));
    }
  }
  std::stable_sort(rep.models.begin(), rep.models.end(), [](const ModelRun& a, const ModelRun& b) {
    auto pos = [](const std::string& n) {
      return std::find(model_order().begin(), model_order().end(), n) - model_order().begin();
    };
    return pos(a.name) < pos(b.name);
  });
  return rep;
}

inline std::vector<ComparisonResult> compare_runs(const ExperimentReport& rep, double alpha) {
  std::vector<ComparisonResult> out;
  for (const auto& [a, b] : comparison_pairs()) {
    const auto xa = rep.aucs(a), xb = rep.aucs(b);
    if (xa.empty() || xb.empty() || xa.size() < 2) continue;
    auto c = paired_ttest(xa, xb, alpha);
    c.model_a = a;
    c.model_b = b;
    out.push_back(c);
  }
  return out;
}

inline ExperimentReport run_experiment(const tabular::Cohort& cohort, std::span<const nn::Tensor> clips,
                                       const ExperimentConfig& cfg) {
  cfg.validate();
  cohort.validate();
  ExperimentReport rep;
  for (std::size_t r = 1; r <= cfg.runs; ++r) rep.runs.push_back(run_once(cohort, clips, cfg, r));
  rep.comparisons = compare_runs(rep, cfg.alpha);
  return rep;
}

inline std::string mean_sd_cell(std::span<const double> v) {
  if (v.empty()) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f (%.2f)", mean_of(v), sd_of(v));
  return buf;
}

// Plain-text results table: one row per input combination, mean (sd) AUC.
inline std::string render_table(const ExperimentReport& rep) {
  char line[160];
  std::string out;
  std::snprintf(line, sizeof line, "%-8s  %-14s  %-14s  %-14s  %-14s\n", "Model", "Additive", "Logistic", "Random",
                "XGBoost");
  out += line;
  std::snprintf(line, sizeof line, "%-8s  %-14s  %-14s  %-14s  %-14s\n", "Input", "(proposed)", "Regression", "Forest", "");
  out += line;
  out += std::string(72, '-') + "\n";
  for (const auto& name : model_order()) {
    const auto a = rep.aucs(name);
    if (a.empty()) continue;
    std::snprintf(line, sizeof line, "%-8s  %-14s  %-14s  %-14s  %-14s\n", model_label(name).c_str(),
                  mean_sd_cell(a).c_str(), mean_sd_cell(rep.aucs(name, true)).c_str(), "-", "-");
    out += line;
  }
  if (!rep.comparisons.empty()) {
    out += "\nPaired t-tests (two-sided)\n";
    for (const auto& c : rep.comparisons) {
      std::snprintf(line, sizeof line, "%-8s vs %-8s  diff %+.4f  t %9.3f  p %.3g  %s\n", model_label(c.model_a).c_str(),
                    model_label(c.model_b).c_str(), c.mean_difference, c.t, c.p,
                    c.significant ? "significant" : "not significant");
      out += line;
    }
  }
  return out;
}

inline nlohmann::ordered_json history_json(const LossHistory& h) {
  return {{"train", h.train}, {"validation", h.validation}, {"best_epoch", h.best_epoch}};
}

inline nlohmann::ordered_json report_json(const ExperimentReport& rep, const ExperimentConfig& cfg) {
  using nlohmann::ordered_json;
  ordered_json runs = ordered_json::array();
  for (const auto& r : rep.runs) {
    ordered_json models = ordered_json::object();
    auto add = [&](const ModelRun& m, const std::string& key) {
      ordered_json e = {{"auc", m.auc}, {"history", history_json(m.history)}};
      if (m.model) {
        ordered_json w = ordered_json::object();
        for (const auto& f : interpret::model_weights(*m.model)) w[f.feature] = f.weight;
        e["weights"] = w;
        e["min_fusion_weight"] = std::isfinite(m.min_fusion_weight) ? ordered_json(m.min_fusion_weight) : ordered_json();
      }
      models[key] = e;
    };
    for (const auto& m : r.models) add(m, m.name);
    for (const auto& m : r.logistic) add(m, m.name + "_logistic");
    runs.push_back({{"run_id", r.run_id},
                    {"seed", r.seed},
                    {"split", {{"train", r.split.train.size()}, {"validation", r.split.validation.size()}, {"test", r.split.test.size()}}},
                    {"models", models}});
  }
  ordered_json summary = ordered_json::object();
  for (const auto& name : model_order()) {
    const auto a = rep.aucs(name);
    if (a.empty()) continue;
    summary[name] = {{"aucs", a}, {"mean", mean_of(a)}, {"sd", sd_of(a)}};
    const auto l = rep.aucs(name, true);
    if (!l.empty()) summary[name + "_logistic"] = {{"aucs", l}, {"mean", mean_of(l)}, {"sd", sd_of(l)}};
  }
  ordered_json comps = ordered_json::array();
  for (const auto& c : rep.comparisons)
    comps.push_back({{"model_a", c.model_a},
                     {"model_b", c.model_b},
                     {"mean_difference", c.mean_difference},
                     {"t", std::isfinite(c.t) ? ordered_json(c.t) : ordered_json(c.t > 0 ? "inf" : "-inf")},
                     {"p", c.p},
                     {"significant", c.significant}});
  return {{"format", "seprisk-metrics"},
          {"version", 1},
          {"seed", cfg.seed},
          {"runs", rep.runs.size()},
          {"alpha", cfg.alpha},
          {"per_run", runs},
          {"summary", summary},
          {"comparisons", comps}};
}

}  // namespace seprisk::eval
