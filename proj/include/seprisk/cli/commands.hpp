#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "seprisk/additive/serialize.hpp"
#include "seprisk/cli/config.hpp"
#include "seprisk/cli/schema.hpp"
#include "seprisk/eval/experiment.hpp"
#include "seprisk/interpret.hpp"
#include "seprisk/nn.hpp"
#include "seprisk/nn/grad_check.hpp"
#include "seprisk/synth/mcar.hpp"
#include "seprisk/synth/tabular.hpp"
#include "seprisk/synth/video.hpp"
#include "seprisk/tabular.hpp"
#include "seprisk/video/clip.hpp"
#include "seprisk/video/feature_maps.hpp"
#include "seprisk/video/serialize.hpp"
#include "seprisk/video/svid.hpp"

namespace seprisk::cli {

namespace fs = std::filesystem;

inline std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

// Keeps [A-Za-z0-9_.-]; anything else becomes '_'.
inline std::string safe_name(const std::string& s) {
  std::string out = s;
  for (char& c : out)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-')) c = '_';
  return out;
}

inline tabular::Cohort read_cohort(const RunConfig& cfg) {
  require(!cfg.cohort.empty(), "no cohort CSV given (--cohort)");
  require(fs::exists(cfg.cohort), "cohort file '" + cfg.cohort + "' does not exist");
  return tabular::read_cohort_csv(cfg.cohort, find_schema(cfg.cohort, cfg.schema));
}

inline void write_cohort(const std::string& path, const tabular::Cohort& c) {
  tabular::write_cohort_csv(path, c);
  write_schema(schema_path_for(path), c.specs);
}

// Clips are linked to cohort rows by position. Frame counts are brought to
// the configured length; spatial size must already match.
inline std::vector<nn::Tensor> read_clips(const RunConfig& cfg, std::size_t rows) {
  require(!cfg.videos.empty(), "video modality selected but no video file given (--videos)");
  require(fs::exists(cfg.videos), "video file '" + cfg.videos + "' does not exist");
  std::vector<nn::Tensor> clips = video::read_svid(cfg.videos);
  require(clips.size() == rows, "video file holds " + std::to_string(clips.size()) + " clips but the cohort has " +
                                    std::to_string(rows) + " rows");
  for (auto& c : clips) {
    require(c.dim(1) == cfg.net.height && c.dim(2) == cfg.net.width,
            "video clips are " + std::to_string(c.dim(1)) + "x" + std::to_string(c.dim(2)) + ", network expects " +
                std::to_string(cfg.net.height) + "x" + std::to_string(cfg.net.width));
    if (c.dim(0) != cfg.net.frames) c = video::preprocess_video(video::RawClip{c}, cfg.net.frames).frames;
  }
  return clips;
}

// ---- prep ----------------------------------------------------------------

inline ordered_json prep_report_json(const tabular::PrepReport& r, const tabular::Cohort& out) {
  return {{"stages",
           {{"outliers_removed", r.outliers_removed},
            {"interpolated", r.interpolated},
            {"mice_imputed", r.mice_imputed},
            {"diastolic_imputed", r.diastolic_imputed}}},
          {"total_modified", r.total_modified()},
          {"dropped_columns", r.dropped_columns},
          {"warnings", r.warnings},
          {"rows", out.rows()},
          {"features", out.cols()},
          {"missing_after", out.missing_count()}};
}

inline tabular::PrepReport cmd_prep(const RunConfig& cfg, std::ostream& log) {
  const tabular::Cohort raw = read_cohort(cfg);
  auto [cohort, report] = tabular::prepare_cohort(raw, cfg.prep);
  const std::string csv = join(cfg.out, "cohort.csv");
  write_cohort(csv, cohort);
  io::write_file_atomic(join(cfg.out, "prep_report.json"), prep_report_json(report, cohort).dump(2) + "\n");
  log << "prep: " << raw.rows() << " rows, " << report.outliers_removed << " outliers removed, "
      << report.interpolated << " interpolated, " << report.mice_imputed << " MICE-imputed, "
      << report.diastolic_imputed << " diastolic imputed\n";
  for (const auto& w : report.warnings) log << "warning: " << w << "\n";
  for (const auto& d : report.dropped_columns) log << "dropped column: " << d << "\n";
  log << "wrote " << csv << "\n";
  return report;
}

// ---- synth ---------------------------------------------------------------

struct SynthOutput {
  synth::SyntheticCohort data;
  std::vector<double> latent;  // video latent per row; empty without video
};

inline SynthOutput make_synthetic(const RunConfig& cfg) {
  const synth::GeneratorSpec spec = cfg.synth.generator == "recovery" ? synth::recovery_spec() : synth::multimodal_spec();
  SynthOutput out;
  std::vector<double> extra;
  if (cfg.synth.video) {
    Rng rng(derive_seed(cfg.seed, 1));
    for (std::size_t i = 0; i < cfg.synth.rows; ++i) out.latent.push_back(rng.normal());
    for (double z : out.latent) extra.push_back(cfg.synth.video_strength * z);
  }
  out.data = synth::gen_tabular(spec, cfg.synth.rows, derive_seed(cfg.seed, 2), extra);
  if (cfg.synth.missing_rate > 0.0) {
    auto& c = out.data.cohort;
    Eigen::MatrixXd m(static_cast<Eigen::Index>(c.rows()), static_cast<Eigen::Index>(c.cols()));
    for (std::size_t r = 0; r < c.rows(); ++r)
      for (std::size_t j = 0; j < c.cols(); ++j) m(r, j) = c.at(r, j);
    const auto masked = synth::mask_mcar(m, cfg.synth.missing_rate, derive_seed(cfg.seed, 3));
    for (std::size_t r = 0; r < c.rows(); ++r)
      for (std::size_t j = 0; j < c.cols(); ++j) c.at(r, j) = masked.values(r, j);
  }
  return out;
}

inline void cmd_synth(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  const SynthOutput s = make_synthetic(cfg);
  const auto& c = s.data.cohort;
  write_cohort(join(cfg.out, "cohort.csv"), c);
  std::string truth = "patient_id,label,true_logodds,true_prob";
  if (!s.latent.empty()) truth += ",video_latent";
  truth += "\n";
  for (std::size_t r = 0; r < c.rows(); ++r) {
    truth += c.patient_ids[r] + "," + std::to_string(c.labels[r]) + "," + tabular::format_number(s.data.true_logodds[r]) +
             "," + tabular::format_number(s.data.true_prob[r]);
    if (!s.latent.empty()) truth += "," + tabular::format_number(s.latent[r]);
    truth += "\n";
  }
  io::write_file_atomic(join(cfg.out, "truth.csv"), truth);
  log << "synth: " << c.rows() << " rows, " << c.cols() << " features, prevalence "
      << static_cast<double>(std::count(c.labels.begin(), c.labels.end(), 1)) / static_cast<double>(c.rows()) << "\n";
  if (!s.latent.empty()) {
    const synth::VideoDims dims{cfg.net.frames, cfg.net.height, cfg.net.width};
    video::write_svid(join(cfg.out, "videos.svid"), synth::render_clips(s.latent, dims, derive_seed(cfg.seed, 4)));
    log << "synth: " << c.rows() << " clips of " << dims.frames << "x" << dims.height << "x" << dims.width << "\n";
  }
  log << "wrote " << cfg.out << "\n";
}

// ---- train ---------------------------------------------------------------

inline std::string run_dir(const std::string& out, std::size_t run_id) {
  return join(join(out, "runs"), std::to_string(run_id));
}

inline eval::ExperimentReport cmd_train(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  const tabular::Cohort cohort = read_cohort(cfg);
  require(cohort.missing_count() == 0, "cohort has missing values; run 'prep' first");
  std::vector<nn::Tensor> clips;
  if (cfg.has("video")) clips = read_clips(cfg, cohort.rows());
  const eval::ExperimentConfig exp = cfg.experiment();
  const eval::ExperimentReport rep = eval::run_experiment(cohort, clips, exp);

  for (const auto& run : rep.runs) {
    const std::string dir = run_dir(cfg.out, run.run_id);
    for (const auto& m : run.models)
      if (m.model) additive::save_model(join(join(dir, m.name), "model.json"), *m.model);
    if (run.video_net) video::save_net(join(join(dir, "video"), "net.json"), *run.video_net);
  }
  io::write_file_atomic(join(join(cfg.out, "metrics"), "metrics.json"), eval::report_json(rep, exp).dump(2) + "\n");
  const std::string table = eval::render_table(rep);
  io::write_file_atomic(join(join(cfg.out, "metrics"), "table.txt"), table);
  io::write_file_atomic(join(cfg.out, "config.json"), config_json(cfg).dump(2) + "\n");
  log << table;
  return rep;
}

// ---- interpret -----------------------------------------------------------

struct InterpretOutput {
  std::vector<std::string> configs;
  std::map<std::string, interpret::FeatureRanking> rankings;
  std::size_t curve_files = 0;
};

// Wide ranking: one row per feature, one column per model configuration
// holding the mean fusion weight ("-" where the feature is not in the model).
inline std::string ranking_table_csv(const std::vector<std::string>& configs,
                                     const std::map<std::string, interpret::FeatureRanking>& rankings) {
  std::map<std::string, std::map<std::string, double>> cells;
  std::map<std::string, double> best;
  for (const auto& c : configs)
    for (const auto& f : rankings.at(c)) {
      cells[f.feature][c] = f.weight;
      best[f.feature] = std::max(best.count(f.feature) ? best[f.feature] : 0.0, f.weight);
    }
  std::vector<std::string> rows;
  for (const auto& [name, _] : best) rows.push_back(name);
  std::stable_sort(rows.begin(), rows.end(), [&](const auto& a, const auto& b) { return best[a] > best[b]; });
  std::string out = "feature";
  for (const auto& c : configs) out += "," + eval::model_label(c);
  out += "\n";
  for (const auto& r : rows) {
    out += r;
    for (const auto& c : configs) {
      auto it = cells[r].find(c);
      out += "," + (it == cells[r].end() ? std::string("-") : tabular::format_number(it->second));
    }
    out += "\n";
  }
  return out;
}

inline InterpretOutput cmd_interpret(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  const tabular::Cohort cohort = read_cohort(cfg);
  const fs::path runs_root = fs::path(cfg.out) / "runs";
  require(fs::is_directory(runs_root), "no trained models under '" + runs_root.string() + "' (run 'train' first)");
  std::vector<std::size_t> run_ids;
  for (const auto& e : fs::directory_iterator(runs_root)) {
    const std::string n = e.path().filename().string();
    if (e.is_directory() && !n.empty() && std::all_of(n.begin(), n.end(), ::isdigit)) run_ids.push_back(std::stoul(n));
  }
  std::sort(run_ids.begin(), run_ids.end());

  InterpretOutput out;
  const std::string curves = join(cfg.out, "curves");
  for (const auto& name : eval::model_order()) {
    if (name == "video") continue;
    std::vector<additive::AdditiveRiskModel> models;
    for (std::size_t id : run_ids) {
      const std::string path = join(join(run_dir(cfg.out, id), name), "model.json");
      if (fs::exists(path)) models.push_back(additive::load_model(path));
    }
    if (models.empty()) continue;
    for (const auto& m : models) additive::design_matrix(m, cohort);  // schema check
    out.configs.push_back(name);
    out.rankings[name] = interpret::rank_features(models);
    io::write_file_atomic(join(curves, "ranking_" + name + ".csv"), interpret::ranking_csv(out.rankings[name]));

    const std::string dir = join(curves, name);
    models.front().for_each_poly([&](const additive::PolyBranch& b, std::size_t) {
      const auto rc = interpret::risk_curve(models, b.feature, cohort, cfg.interpret.grid, cfg.interpret.bins);
      const std::string base = join(dir, safe_name(b.feature));
      io::write_file_atomic(base + ".csv", interpret::risk_curve_csv(rc));
      io::write_file_atomic(base + "_hist.csv", interpret::histogram_csv(rc.histograms));
      io::write_file_atomic(base + ".svg", interpret::risk_curve_svg(rc));
      out.curve_files += 3;
    });
    if (!models.front().binary_branches.empty()) {
      std::string odds = "feature,run_id,weight,odds_ratio\n";
      for (std::size_t i = 0; i < models.front().binary_branches.size(); ++i)
        for (std::size_t r = 0; r < models.size(); ++r) {
          const auto& b = models[r].binary_branches.at(i);
          odds += b.feature + "," + std::to_string(r + 1) + "," + tabular::format_number(b.weight) + "," +
                  tabular::format_number(std::exp(b.weight)) + "\n";
        }
      io::write_file_atomic(join(dir, "binary_odds.csv"), odds);
      ++out.curve_files;
    }
  }
  require(!out.configs.empty(), "no model files found under '" + runs_root.string() + "'");
  io::write_file_atomic(join(curves, "ranking.csv"), ranking_table_csv(out.configs, out.rankings));

  const std::string net_path = run_ids.empty() ? "" : join(join(run_dir(cfg.out, run_ids.front()), "video"), "net.json");
  if (cfg.has("video") && !cfg.videos.empty() && fs::exists(net_path)) {
    video::VideoNet net = video::load_net(net_path);
    const auto clips = read_clips(cfg, cohort.rows());
    const auto paths = video::export_feature_maps(net, clips.front(), 1, 0, join(curves, "video"), "conv");
    log << "interpret: wrote " << paths.size() << " feature maps\n";
  }

  log << ranking_table_csv(out.configs, out.rankings);
  log << "interpret: wrote " << out.curve_files << " curve files under " << curves << "\n";
  return out;
}

// ---- selftest ------------------------------------------------------------

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace detail {

inline nn::Tensor random_tensor(std::vector<std::size_t> shape, Rng& rng) {
  nn::Tensor t(std::move(shape));
  for (double& v : t.data()) v = rng.uniform(-1.0, 1.0);
  return t;
}

inline double dot(const nn::Tensor& a, const nn::Tensor& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.data()[i] * b.data()[i];
  return s;
}

inline void zero_grads(const std::vector<nn::Param*>& ps) {
  for (nn::Param* p : ps)
    if (p->trainable) p->zero_grad();
}

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

}  // namespace detail

inline std::vector<Check> run_selftest(std::uint64_t seed) {
  using namespace nn;
  std::vector<Check> checks;
  auto add = [&](std::string name, bool ok, std::string detail) { checks.push_back({std::move(name), ok, std::move(detail)}); };
  Rng rng(seed);

  const auto pc = video::param_count(video::VideoNetConfig{});
  add("video parameter count", pc.trainable == 4237 && pc.non_trainable == 56,
      std::to_string(pc.trainable) + " trainable / " + std::to_string(pc.non_trainable) + " non-trainable");
  {
    const std::vector<std::size_t> expected = {40, 148, 16, 296, 584, 32, 584, 584, 32, 584, 584, 32, 544, 208, 20, 5};
    const auto rows = video::layer_table(video::VideoNetConfig{});
    bool ok = rows.size() == expected.size();
    for (std::size_t i = 0; ok && i < rows.size(); ++i) ok = rows[i].params == expected[i];
    add("video layer table", ok, std::to_string(rows.size()) + " rows");
  }

  {
    double worst = 0.0;
    Dense d("d", 5, 3, Activation::sigmoid);
    d.init(rng);
    Tensor x = detail::random_tensor({4, 5}, rng), r = detail::random_tensor({4, 3}, rng);
    detail::zero_grads(d.params());
    Tensor gx = d.backward(x, d.forward(x), r);
    auto loss = [&] { return detail::dot(r, d.forward(x)); };
    worst = std::max({worst, grad_check(loss, d.params()), grad_check(loss, x.data(), gx.data())});

    Conv2d conv("c", 2, 3);
    conv.init(rng);
    Tensor cx = detail::random_tensor({1, 2, 5, 6}, rng), cr = detail::random_tensor({1, 3, 5, 6}, rng);
    detail::zero_grads(conv.params());
    Tensor cgx = conv.backward(cx, cr);
    auto closs = [&] { return detail::dot(cr, conv.forward(cx)); };
    worst = std::max({worst, grad_check(closs, conv.params()), grad_check(closs, cx.data(), cgx.data())});

    Lstm lstm("l", 2, 3);
    lstm.init(rng);
    Tensor lx = detail::random_tensor({4, 2}, rng), lr = detail::random_tensor({4, 3}, rng);
    detail::zero_grads(lstm.params());
    LstmCache cache;
    lstm.forward(lx, &cache);
    Tensor lgx = lstm.backward(cache, lr);
    auto lloss = [&] { return detail::dot(lr, lstm.forward(lx).sequence); };
    worst = std::max({worst, grad_check(lloss, lstm.params()), grad_check(lloss, lx.data(), lgx.data())});
    add("layer gradients (dense, conv, lstm)", worst < 1e-4, "max relative error " + detail::fmt(worst));
  }

  const auto syn = synth::gen_tabular(synth::multimodal_spec(), 300, derive_seed(seed, 1));
  additive::AdditiveRiskModel m = additive::make_model(syn.cohort, {true, true, true}, 3);
  additive::initialize(m, syn.cohort.labels, derive_seed(seed, 2));
  m.for_each_poly([&](additive::PolyBranch& b, std::size_t) { b.weight = rng.uniform(0.0, 2.0); });
  for (auto& b : m.binary_branches) b.weight = rng.normal();
  m.video_weight = 0.7;
  const additive::Dataset d = additive::make_dataset(m, syn.cohort, syn.true_logodds);
  {
    double worst = 0.0;
    const auto theta = additive::pack(m);
    for (std::size_t r = 0; r < 20; ++r) {
      std::vector<double> g(theta.size(), 0.0);
      additive::accumulate_gradient(m, d, r, 1.0, g);
      for (std::size_t k = 0; k < theta.size(); ++k) {
        auto tp = theta, tm = theta;
        tp[k] += kGradCheckStep;
        tm[k] -= kGradCheckStep;
        additive::AdditiveRiskModel mp = m, mm = m;
        additive::unpack(tp, mp);
        additive::unpack(tm, mm);
        const double num = (additive::model_logodds(mp, d.row(r), d.video[r]) -
                            additive::model_logodds(mm, d.row(r), d.video[r])) / (2 * kGradCheckStep);
        worst = std::max(worst, std::abs(g[k] - num));
      }
    }
    add("additive model gradient", worst < 1e-7, "max absolute error " + detail::fmt(worst));
  }
  {
    double worst = 0.0;
    for (std::size_t r = 0; r < d.rows(); ++r) {
      const auto x = d.row(r);
      double sum = m.bias + *m.video_weight * d.video[r];
      std::size_t col = 0;
      m.for_each_poly([&](const additive::PolyBranch& b, std::size_t) { sum += additive::branch_logodds(b, x[col++]); });
      for (const auto& b : m.binary_branches) sum += b.weight * x[col++];
      worst = std::max(worst, std::abs(sum - additive::model_logodds(m, x, d.video[r])));
    }
    add("separability", worst <= 1e-12, "max deviation " + detail::fmt(worst));
  }
  {
    bool ok = true;
    for (int t = 0; t < 200 && ok; ++t) {
      const std::size_t n = 2 + rng.index(60);
      std::vector<double> s(n);
      std::vector<int> y(n);
      for (std::size_t i = 0; i < n; ++i) {
        s[i] = static_cast<double>(rng.index(6));
        y[i] = i < 2 ? static_cast<int>(i) : rng.bernoulli(0.5);
      }
      double num = 0, pairs = 0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          if (!y[i] || y[j]) continue;
          num += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
          pairs += 1;
        }
      ok = std::abs(eval::auc(s, y) - num / pairs) < 1e-12;
    }
    add("AUC vs pair counting", ok, "200 random instances with ties");
  }
  {
    const std::string once = additive::serialize_model(m);
    const std::string twice = additive::serialize_model(additive::parse_model(once));
    add("model save/load/save", once == twice, std::to_string(once.size()) + " bytes");
  }
  {
    const std::vector<double> a = {0.82, 0.83, 0.83, 0.83, 0.83}, b = {0.80, 0.80, 0.80, 0.80, 0.80};
    const auto t = eval::paired_ttest(a, b);
    add("paired t-test", std::abs(t.t - 14.0) < 1e-9 && t.significant, "t = " + std::to_string(t.t));
  }
  return checks;
}

// Prints one line per check; true when all pass. A given model file is
// loaded first, so a corrupt file surfaces as a validation error.
inline bool cmd_selftest(const RunConfig& cfg, const std::string& model_path, std::ostream& log) {
  if (!model_path.empty()) {
    const auto m = additive::load_model(model_path);
    log << "PASS  model file " << model_path << " (" << m.feature_count() << " features)\n";
  }
  bool all = true;
  for (const auto& c : run_selftest(cfg.seed)) {
    log << (c.passed ? "PASS  " : "FAIL  ") << c.name << ": " << c.detail << "\n";
    all &= c.passed;
  }
  log << (all ? "selftest passed\n" : "selftest FAILED\n");
  return all;
}

}  // namespace seprisk::cli
