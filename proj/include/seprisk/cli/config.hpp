#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "seprisk/additive/hierarchy.hpp"
#include "seprisk/eval/experiment.hpp"
#include "seprisk/interpret/risk_curve.hpp"
#include "seprisk/io/atomic_file.hpp"
#include "seprisk/tabular/prep.hpp"

namespace seprisk::cli {

using nlohmann::json;
using nlohmann::ordered_json;

struct SynthSettings {
  std::string generator = "multimodal";  // or "recovery"
  std::size_t rows = 2000;
  bool video = false;
  double video_strength = 1.5;
  double missing_rate = 0.0;
};

struct InterpretSettings {
  interpret::GridSpec grid;
  std::size_t bins = 20;
};

// Everything a command needs. Paths are plain strings; empty means unset.
struct RunConfig {
  std::string cohort;
  std::string schema;
  std::string videos;
  std::string out = "out";
  std::uint64_t seed = 0;
  std::size_t runs = 5;
  std::size_t degree = 3;
  std::set<std::string> modalities = {"cd", "edm"};
  bool logistic_baseline = true;
  TrainConfig train;
  TrainConfig video_train = eval::ExperimentConfig{}.video;
  video::VideoNetConfig net = video::VideoNetConfig::desk();
  tabular::SplitConfig split;
  tabular::PrepConfig prep;
  InterpretSettings interpret;
  SynthSettings synth;

  bool has(const std::string& m) const { return modalities.count(m) > 0; }

  void validate() const {
    require(!modalities.empty(), "config: no modalities selected");
    require(runs >= 1, "config: runs must be >= 1");
    require(degree >= 1, "config: degree must be >= 1");
    train.validate();
    if (has("video")) {
      video_train.validate();
      net.validate();
    }
    require(split.test_fraction > 0 && split.test_fraction < 1, "config: split.test_fraction must lie in (0, 1)");
    require(split.validation_fraction > 0 && split.validation_fraction < 1,
            "config: split.validation_fraction must lie in (0, 1)");
    require(prep.missing_threshold > 0 && prep.missing_threshold <= 1,
            "config: prep.missing_threshold must lie in (0, 1]");
    require(interpret.grid.points >= 2, "config: interpret.grid_points must be >= 2");
    require(interpret.grid.lower_quantile >= 0 && interpret.grid.lower_quantile < interpret.grid.upper_quantile &&
                interpret.grid.upper_quantile <= 1,
            "config: interpret quantiles must satisfy 0 <= lower < upper <= 1");
    require(interpret.bins >= 1, "config: interpret.bins must be >= 1");
    require(synth.generator == "multimodal" || synth.generator == "recovery",
            "config: synth.generator must be 'multimodal' or 'recovery'");
    require(synth.rows >= 10, "config: synth.rows must be >= 10");
    require(synth.missing_rate >= 0 && synth.missing_rate < 1, "config: synth.missing_rate must lie in [0, 1)");
  }

  // Additive configurations whose modalities are all selected, plus the
  // standalone video model when video is selected.
  std::vector<std::string> models() const {
    std::vector<std::string> out;
    for (const auto& name : eval::model_order()) {
      if (name == "video") {
        if (has("video")) out.push_back(name);
        continue;
      }
      const auto f = additive::config_flags(name);
      if ((!f.cd || has("cd")) && (!f.edm || has("edm")) && (!f.video || has("video"))) out.push_back(name);
    }
    return out;
  }

  eval::ExperimentConfig experiment() const {
    eval::ExperimentConfig e;
    e.runs = runs;
    e.models = models();
    e.logistic_baseline = logistic_baseline;
    e.additive = train;
    e.additive.degree = degree;
    e.video = video_train;
    e.net = net;
    e.split = split;
    e.seed = seed;
    return e;
  }
};

inline std::set<std::string> parse_modalities(const std::string& text) {
  std::set<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    require(item == "cd" || item == "edm" || item == "video", "unknown modality '" + item + "' (use cd, edm, video)");
    out.insert(item);
  }
  require(!out.empty(), "empty modality list");
  return out;
}

namespace detail {

// Rejects keys outside `allowed`, naming the offending path.
inline void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  require(j.is_object(), "config: '" + where + "' must be an object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok |= key == a;
    require(ok, "config: unknown key '" + (where.empty() ? key : where + "." + key) + "'");
  }
}

template <class T>
void read(const json& j, const char* key, T& dst, const std::string& where) {
  if (!j.contains(key)) return;
  if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>)
    require(j.at(key).is_number_unsigned(),
            "config: '" + (where.empty() ? std::string(key) : where + "." + key) + "' must be a non-negative integer");
  try {
    dst = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError("config: bad value for '" + (where.empty() ? std::string(key) : where + "." + key) + "'");
  }
}

inline void read_train(const json& j, TrainConfig& t, const std::string& where, bool allow_projection) {
  if (allow_projection)
    check_keys(j, where, {"max_epochs", "patience", "batch_size", "learning_rate", "decay", "epsilon", "projection"});
  else
    check_keys(j, where, {"max_epochs", "patience", "batch_size", "learning_rate", "decay", "epsilon"});
  read(j, "max_epochs", t.max_epochs, where);
  read(j, "patience", t.patience, where);
  read(j, "batch_size", t.batch_size, where);
  read(j, "learning_rate", t.optimizer.learning_rate, where);
  read(j, "decay", t.optimizer.decay, where);
  read(j, "epsilon", t.optimizer.epsilon, where);
  if (j.contains("projection")) {
    std::string p;
    read(j, "projection", p, where);
    require(p == "reflect" || p == "clip", "config: " + where + ".projection must be 'reflect' or 'clip'");
    t.projection = p == "clip" ? Projection::clip : Projection::reflect;
  }
}

}  // namespace detail

// Parses a JSON config over the defaults; any key not listed here is an error.
inline RunConfig parse_config(const std::string& text, RunConfig cfg = {}) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  using detail::read;
  detail::check_keys(j, "", {"cohort", "schema", "videos", "out", "seed", "runs", "degree", "modalities",
                             "logistic_baseline", "train", "video_train", "video_net", "split", "prep", "interpret",
                             "synth"});
  read(j, "cohort", cfg.cohort, "");
  read(j, "schema", cfg.schema, "");
  read(j, "videos", cfg.videos, "");
  read(j, "out", cfg.out, "");
  read(j, "seed", cfg.seed, "");
  read(j, "runs", cfg.runs, "");
  read(j, "degree", cfg.degree, "");
  read(j, "logistic_baseline", cfg.logistic_baseline, "");
  if (j.contains("modalities")) {
    const json& m = j.at("modalities");
    if (m.is_string()) {
      cfg.modalities = parse_modalities(m.get<std::string>());
    } else {
      std::vector<std::string> list;
      read(j, "modalities", list, "");
      std::string joined;
      for (const auto& s : list) joined += (joined.empty() ? "" : ",") + s;
      cfg.modalities = parse_modalities(joined);
    }
  }
  if (j.contains("train")) detail::read_train(j.at("train"), cfg.train, "train", true);
  if (j.contains("video_train")) detail::read_train(j.at("video_train"), cfg.video_train, "video_train", false);
  if (j.contains("video_net")) {
    const json& v = j.at("video_net");
    detail::check_keys(v, "video_net", {"frames", "height", "width"});
    read(v, "frames", cfg.net.frames, "video_net");
    read(v, "height", cfg.net.height, "video_net");
    read(v, "width", cfg.net.width, "video_net");
  }
  if (j.contains("split")) {
    const json& s = j.at("split");
    detail::check_keys(s, "split", {"test_fraction", "validation_fraction"});
    read(s, "test_fraction", cfg.split.test_fraction, "split");
    read(s, "validation_fraction", cfg.split.validation_fraction, "split");
  }
  if (j.contains("prep")) {
    const json& p = j.at("prep");
    detail::check_keys(p, "prep", {"missing_threshold", "mice_iterations"});
    read(p, "missing_threshold", cfg.prep.missing_threshold, "prep");
    read(p, "mice_iterations", cfg.prep.mice.iterations, "prep");
  }
  if (j.contains("interpret")) {
    const json& i = j.at("interpret");
    detail::check_keys(i, "interpret", {"grid_points", "lower_quantile", "upper_quantile", "bins"});
    read(i, "grid_points", cfg.interpret.grid.points, "interpret");
    read(i, "lower_quantile", cfg.interpret.grid.lower_quantile, "interpret");
    read(i, "upper_quantile", cfg.interpret.grid.upper_quantile, "interpret");
    read(i, "bins", cfg.interpret.bins, "interpret");
  }
  if (j.contains("synth")) {
    const json& s = j.at("synth");
    detail::check_keys(s, "synth", {"generator", "rows", "video", "video_strength", "missing_rate"});
    read(s, "generator", cfg.synth.generator, "synth");
    read(s, "rows", cfg.synth.rows, "synth");
    read(s, "video", cfg.synth.video, "synth");
    read(s, "video_strength", cfg.synth.video_strength, "synth");
    read(s, "missing_rate", cfg.synth.missing_rate, "synth");
  }
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const std::runtime_error&) {
    throw ValidationError("config: cannot read '" + path + "'");
  }
  return parse_config(text);
}

// The resolved configuration, written next to outputs for provenance.
inline ordered_json config_json(const RunConfig& c) {
  auto train = [](const TrainConfig& t) {
    return ordered_json{{"max_epochs", t.max_epochs},
                        {"patience", t.patience},
                        {"batch_size", t.batch_size},
                        {"learning_rate", t.optimizer.learning_rate},
                        {"decay", t.optimizer.decay},
                        {"epsilon", t.optimizer.epsilon}};
  };
  ordered_json t = train(c.train);
  t["projection"] = c.train.projection == Projection::clip ? "clip" : "reflect";
  return {{"cohort", c.cohort},
          {"schema", c.schema},
          {"videos", c.videos},
          {"out", c.out},
          {"seed", c.seed},
          {"runs", c.runs},
          {"degree", c.degree},
          {"modalities", std::vector<std::string>(c.modalities.begin(), c.modalities.end())},
          {"logistic_baseline", c.logistic_baseline},
          {"train", t},
          {"video_train", train(c.video_train)},
          {"video_net", {{"frames", c.net.frames}, {"height", c.net.height}, {"width", c.net.width}}},
          {"split", {{"test_fraction", c.split.test_fraction}, {"validation_fraction", c.split.validation_fraction}}},
          {"prep", {{"missing_threshold", c.prep.missing_threshold}, {"mice_iterations", c.prep.mice.iterations}}},
          {"interpret",
           {{"grid_points", c.interpret.grid.points},
            {"lower_quantile", c.interpret.grid.lower_quantile},
            {"upper_quantile", c.interpret.grid.upper_quantile},
            {"bins", c.interpret.bins}}},
          {"synth",
           {{"generator", c.synth.generator},
            {"rows", c.synth.rows},
            {"video", c.synth.video},
            {"video_strength", c.synth.video_strength},
            {"missing_rate", c.synth.missing_rate}}}};
}

}  // namespace seprisk::cli
