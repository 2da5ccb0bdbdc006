#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "seprisk/additive/hierarchy.hpp"
#include "seprisk/additive/model.hpp"
#include "seprisk/additive/serialize.hpp"
#include "seprisk/additive/train.hpp"
#include "seprisk/eval/auc.hpp"
#include "seprisk/synth/oracle.hpp"
#include "seprisk/synth/tabular.hpp"
#include "seprisk/tabular/logistic.hpp"
#include "seprisk/tabular/split.hpp"

using namespace seprisk;
using namespace seprisk::additive;

namespace {

struct Parts {
  tabular::Cohort train, validation, test;
  tabular::Split split;
};

Parts split_parts(const tabular::Cohort& c, std::uint64_t seed) {
  Parts p;
  p.split = tabular::split_cohort(c.labels, seed);
  p.train = c.subset(p.split.train);
  p.validation = c.subset(p.split.validation);
  p.test = c.subset(p.split.test);
  return p;
}

AdditiveRiskModel random_model(const tabular::Cohort& c, ModalityFlags flags, std::uint64_t seed) {
  AdditiveRiskModel m = make_model(c, flags, 3);
  initialize(m, c.labels, seed);
  Rng rng(seed + 1);
  m.for_each_poly([&](PolyBranch& b, std::size_t) { b.weight = rng.uniform(0.0, 2.0); });
  for (auto& b : m.binary_branches) b.weight = rng.uniform(-1.0, 1.0);
  if (m.video_weight) m.video_weight = rng.uniform(0.0, 1.0);
  m.bias = rng.normal();
  return m;
}

TrainConfig quick_config(std::size_t epochs, std::uint64_t seed) {
  TrainConfig cfg;
  cfg.max_epochs = epochs;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST(Poly, Features) {
  EXPECT_EQ(poly_features(0.0, 3), (std::vector<double>{0, 0, 0}));
  EXPECT_EQ(poly_features(1.0, 4), (std::vector<double>{1, 1, 1, 1}));
  EXPECT_EQ(poly_features(-0.5, 3), (std::vector<double>{-0.5, 0.25, -0.125}));
  EXPECT_THROW(poly_features(0.5, 0), ValidationError);
  EXPECT_THROW(poly_features(NAN, 3), ValidationError);
}

TEST(Poly, ValueMatchesFeatureDotProduct) {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 1 + rng.index(5);
    std::vector<double> a(d);
    for (double& v : a) v = rng.normal();
    const double x = rng.uniform(-1.5, 1.5);
    const auto f = poly_features(x, d);
    double dot = 0;
    for (std::size_t i = 0; i < d; ++i) dot += a[i] * f[i];
    EXPECT_NEAR(poly_value(a, x), dot, 1e-12);
  }
}

TEST(Branch, Examples) {
  PolyBranch b{"x", Modality::cd, FeatureKind::continuous, {1, 0, 0}, 0.0, {}};
  for (double x : {-1.0, 0.3, 0.9}) EXPECT_EQ(branch_logodds(b, x), 0.0);
  b.weight = 1.0;
  EXPECT_DOUBLE_EQ(branch_logodds(b, 0.3), 0.3);
  b.weight = 2.0;
  b.coeffs = {0.6, 0.8, 0.0};
  EXPECT_DOUBLE_EQ(branch_logodds(b, 0.5), 1.0);
}

TEST(Branch, SignOfCoefficientsMatters) {
  PolyBranch b{"x", Modality::cd, FeatureKind::continuous, {0.6, 0.0, 0.8}, 1.5, {}};
  PolyBranch flipped = b;
  for (double& a : flipped.coeffs) a = -a;
  EXPECT_NE(branch_logodds(b, 0.4), branch_logodds(flipped, 0.4));
}

TEST(Model, Examples) {
  const auto syn = synth::gen_tabular(synth::multimodal_spec(), 50, 2);
  AdditiveRiskModel m = make_model(syn.cohort, {true, true, false}, 3);
  m.bias = 0.4;
  const std::vector<double> sample(m.feature_count(), 0.7);
  EXPECT_EQ(model_logodds(m, sample), 0.4);

  m.bias = 0.0;
  const std::size_t off = m.scalar_branches.size() + m.edm_branches.size();
  ASSERT_EQ(m.binary_branches[0].feature, "sex_male");
  m.binary_branches[0].weight = -0.7;
  std::vector<double> x(m.feature_count(), 0.0);
  x[off] = 1.0;
  EXPECT_DOUBLE_EQ(model_logodds(m, x), -0.7);

  EXPECT_EQ(predict_risk(m, std::vector<double>(m.feature_count(), 0.0)), 0.5);
  m.binary_branches[0].weight = 0.0;
  m.bias = 1.0;
  EXPECT_NEAR(predict_risk(m, x), 0.73106, 1e-5);
  for (double p : {0.01, 0.3, 0.5, 0.97}) {
    m.bias = logit(p);
    EXPECT_NEAR(predict_risk(m, x), p, 1e-12);
  }
}

TEST(Model, InputErrors) {
  const auto syn = synth::gen_tabular(synth::multimodal_spec(), 50, 3);
  AdditiveRiskModel m = make_model(syn.cohort, {true, false, false}, 3);
  std::vector<double> x(m.feature_count(), 0.1);
  EXPECT_THROW(model_logodds(m, std::vector<double>(2, 0.0)), ValidationError);
  EXPECT_THROW(model_logodds(m, x, 0.5), ValidationError);
  x[1] = tabular::kMissing;
  EXPECT_THROW(model_logodds(m, x), ValidationError);
  AdditiveRiskModel mv = make_model(syn.cohort, {true, false, true}, 3);
  EXPECT_THROW(model_logodds(mv, std::vector<double>(mv.feature_count(), 0.0)), ValidationError);
}

TEST(Model, SeparableSumOfBranches) {
  const auto syn = synth::gen_tabular(synth::multimodal_spec(), 200, 4);
  const AdditiveRiskModel m = random_model(syn.cohort, {true, true, true}, 5);
  const Dataset d = make_dataset(m, syn.cohort, syn.true_logodds);
  for (std::size_t r = 0; r < d.rows(); ++r) {
    const auto x = d.row(r);
    double sum = m.bias;
    std::size_t col = 0;
    for (const auto* group : {&m.scalar_branches, &m.edm_branches})
      for (const auto& b : *group) {
        double acc = 0, xp = 1;
        for (double a : b.coeffs) acc += a * (xp *= x[col]);
        sum += b.weight * acc;
        ++col;
      }
    for (const auto& b : m.binary_branches) sum += b.weight * x[col++];
    sum += *m.video_weight * d.video[r];
    EXPECT_NEAR(model_logodds(m, x, d.video[r]), sum, 1e-12);
  }
}

TEST(Model, CdOnlyIgnoresEdmColumns) {
  const auto syn = synth::gen_tabular(synth::multimodal_spec(), 300, 6);
  const AdditiveRiskModel m = random_model(syn.cohort, {true, false, false}, 7);
  EXPECT_TRUE(m.edm_branches.empty());
  tabular::Cohort shuffled = syn.cohort;
  Rng rng(8);
  for (std::size_t c = 0; c < shuffled.cols(); ++c) {
    if (shuffled.specs[c].modality != Modality::edm) continue;
    for (std::size_t r = shuffled.rows() - 1; r > 0; --r) std::swap(shuffled.at(r, c), shuffled.at(rng.index(r + 1), c));
  }
  EXPECT_EQ(predict_logodds(m, make_dataset(m, syn.cohort)), predict_logodds(m, make_dataset(m, shuffled)));
}

TEST(Model, ZeroVideoWeightMatchesModelWithoutVideo) {
  const auto syn = synth::gen_tabular(synth::multimodal_spec(), 200, 9);
  const AdditiveRiskModel sv = random_model(syn.cohort, {true, true, false}, 10);
  AdditiveRiskModel sV = sv;
  sV.modalities.video = true;
  sV.video_weight = 0.0;
  const auto a = predict_logodds(sv, make_dataset(sv, syn.cohort));
  const auto b = predict_logodds(sV, make_dataset(sV, syn.cohort, syn.true_logodds));
  EXPECT_EQ(a, b);
}

TEST(Model, DesignMatrixChecks) {
  const auto syn = synth::gen_tabular(synth::multimodal_spec(), 60, 11);
  const AdditiveRiskModel m = make_model(syn.cohort, {true, true, false}, 3);
  tabular::Cohort c = syn.cohort;
  c.at(3, 0) = tabular::kMissing;
  EXPECT_THROW(design_matrix(m, c), ValidationError);
  const auto cd_only = synth::gen_tabular(synth::recovery_spec(), 60, 12);
  EXPECT_THROW(design_matrix(m, cd_only.cohort), ValidationError);
  EXPECT_THROW(make_dataset(m, syn.cohort, syn.true_prob), ValidationError);
  // training rows map to [-1, 1]
  for (double v : design_matrix(m, syn.cohort)) {
    EXPECT_GE(v, -1.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Gradient, MatchesFiniteDifferences) {
  const auto syn = synth::gen_tabular(synth::multimodal_spec(), 40, 13);
  const AdditiveRiskModel m = random_model(syn.cohort, {true, true, true}, 14);
  const Dataset d = make_dataset(m, syn.cohort, syn.true_logodds);
  const std::vector<double> theta = pack(m);
  for (std::size_t r = 0; r < d.rows(); ++r) {
    std::vector<double> grad(theta.size(), 0.0);
    accumulate_gradient(m, d, r, 1.0, grad);
    for (std::size_t k = 0; k < theta.size(); ++k) {
      const double h = 1e-6;
      AdditiveRiskModel mp = m, mm = m;
      auto tp = theta, tm = theta;
      tp[k] += h;
      tm[k] -= h;
      unpack(tp, mp);
      unpack(tm, mm);
      const double num = (model_logodds(mp, d.row(r), d.video[r]) - model_logodds(mm, d.row(r), d.video[r])) / (2 * h);
      EXPECT_NEAR(grad[k], num, 1e-7);
    }
  }
  AdditiveRiskModel back = m;
  unpack(theta, back);
  EXPECT_EQ(pack(back), theta);
  EXPECT_THROW(unpack(std::vector<double>(theta.size() + 1, 0.0), back), ValidationError);
}

TEST(Projection, UnitNormAndNonNegativePreservingOutput) {
  const auto syn = synth::gen_tabular(synth::multimodal_spec(), 50, 15);
  Rng rng(16);
  for (Projection mode : {Projection::reflect, Projection::clip}) {
    for (int trial = 0; trial < 50; ++trial) {
      AdditiveRiskModel m = random_model(syn.cohort, {true, true, true}, 17 + trial);
      m.for_each_poly([&](PolyBranch& b, std::size_t) {
        for (double& a : b.coeffs) a = rng.normal();
        b.weight = rng.normal();
      });
      m.video_weight = -0.2;
      const AdditiveRiskModel before = m;
      project(m, mode);
      EXPECT_GE(m.min_fusion_weight(), 0.0);
      EXPECT_EQ(*m.video_weight, 0.0);
      const auto x = poly_features(0.37, 1);
      for (std::size_t i = 0; i < m.scalar_branches.size(); ++i) {
        const auto& b = m.scalar_branches[i];
        double n = 0;
        for (double a : b.coeffs) n += a * a;
        EXPECT_NEAR(n, 1.0, 1e-12);
        const auto& o = before.scalar_branches[i];
        if (mode == Projection::reflect || o.weight >= 0) {
          EXPECT_NEAR(branch_logodds(b, x[0]), branch_logodds(o, x[0]), 1e-12);
        } else {
          EXPECT_EQ(b.weight, 0.0);
        }
      }
    }
  }
}

TEST(Initialize, Defaults) {
  const auto syn = synth::gen_tabular(synth::multimodal_spec(), 400, 18);
  AdditiveRiskModel m = make_model(syn.cohort, {true, true, true}, 3);
  initialize(m, syn.cohort.labels, 19);
  double prev = 0;
  for (int y : syn.cohort.labels) prev += y;
  prev /= static_cast<double>(syn.cohort.rows());
  EXPECT_NEAR(m.bias, std::log(prev / (1 - prev)), 1e-12);
  EXPECT_EQ(*m.video_weight, 0.1);
  m.for_each_poly([](const PolyBranch& b, std::size_t) {
    EXPECT_EQ(b.weight, 0.1);
    double n = 0;
    for (double a : b.coeffs) n += a * a;
    EXPECT_NEAR(n, 1.0, 1e-12);
  });
  for (const auto& b : m.binary_branches) EXPECT_EQ(b.weight, 0.0);
  EXPECT_THROW(initialize(m, std::vector<int>(10, 1), 1), ValidationError);
}

TEST(Train, ZeroEpochsReturnsInitialModel) {
  const auto syn = synth::gen_tabular(synth::multimodal_spec(), 500, 20);
  const Parts p = split_parts(syn.cohort, 21);
  AdditiveRiskModel m = make_model(p.train, {true, false, false}, 3);
  initialize(m, p.train.labels, 22);
  const auto res = train(m, make_dataset(m, p.train), make_dataset(m, p.validation), quick_config(0, 1));
  EXPECT_EQ(pack(res.model), pack(m));
  EXPECT_TRUE(res.history.train.empty());
  EXPECT_EQ(res.steps, 0u);
}

TEST(Train, WeightsStayNonNegativeAndRunIsDeterministic) {
  const auto syn = synth::gen_tabular(synth::multimodal_spec(), 2000, 23);
  const Parts p = split_parts(syn.cohort, 24);
  for (Projection mode : {Projection::reflect, Projection::clip}) {
    TrainConfig cfg = quick_config(30, 25);
    cfg.projection = mode;
    const auto a = fit_additive({true, true, false}, p.train, p.validation, {}, {}, cfg);
    const auto b = fit_additive({true, true, false}, p.train, p.validation, {}, {}, cfg);
    EXPECT_GT(a.steps, 0u);
    EXPECT_GE(a.min_fusion_weight, 0.0);
    EXPECT_GE(a.model.min_fusion_weight(), 0.0);
    EXPECT_EQ(a.history.train, b.history.train);
    EXPECT_EQ(a.history.validation, b.history.validation);
    EXPECT_EQ(pack(a.model), pack(b.model));
    ASSERT_GE(a.history.best_epoch, 1u);
    const double best = a.history.validation[a.history.best_epoch - 1];
    for (double v : a.history.validation) EXPECT_GE(v, best);
  }
}

TEST(Train, EarlyStoppingRespectsPatience) {
  const auto syn = synth::gen_tabular(synth::multimodal_spec(), 1500, 26);
  const Parts p = split_parts(syn.cohort, 27);
  TrainConfig cfg = quick_config(200, 28);
  cfg.patience = 3;
  const auto res = fit_additive({true, true, false}, p.train, p.validation, {}, {}, cfg);
  const auto& v = res.history.validation;
  ASSERT_LT(v.size(), cfg.max_epochs);
  EXPECT_EQ(v.size(), res.history.best_epoch + cfg.patience);
}

TEST(Train, Errors) {
  const auto syn = synth::gen_tabular(synth::multimodal_spec(), 300, 29);
  const Parts p = split_parts(syn.cohort, 30);
  AdditiveRiskModel m = make_model(p.train, {true, false, false}, 3);
  initialize(m, p.train.labels, 1);
  Dataset empty = make_dataset(m, p.train.subset({}));
  EXPECT_THROW(train(m, empty, make_dataset(m, p.validation), quick_config(5, 1)), ValidationError);
  tabular::Cohort one_class = p.train;
  std::fill(one_class.labels.begin(), one_class.labels.end(), 0);
  EXPECT_THROW(fit_additive({true, false, false}, one_class, p.validation, {}, {}, quick_config(5, 1)), ValidationError);
  TrainConfig bad = quick_config(5, 1);
  bad.patience = 5;
  EXPECT_THROW(bad.validate(), ValidationError);
}

TEST(Train, ApproachesOracleAucOnSyntheticCohort) {
  const auto syn = synth::gen_tabular(synth::recovery_spec(), 20000, 31);
  const Parts p = split_parts(syn.cohort, 32);
  const auto res = fit_additive({true, false, false}, p.train, p.validation, {}, {}, quick_config(200, 33));
  const auto test = make_dataset(res.model, p.test);
  const double fitted = eval::auc(predict_risk(res.model, test), p.test.labels);
  std::vector<double> true_prob;
  for (std::size_t i : p.split.test) true_prob.push_back(syn.true_prob[i]);
  const double oracle = synth::oracle_auc(true_prob, p.test.labels);
  EXPECT_GT(fitted, oracle - 0.02) << "fitted " << fitted << " oracle " << oracle;
}

TEST(Train, DegreeOneUnconstrainedMatchesLogisticRegression) {
  synth::GeneratorSpec spec;
  spec.bias = -0.5;
  const double effects[6] = {1.2, -0.8, 0.5, 0.0, 2.0, -1.5};
  for (int i = 0; i < 6; ++i) {
    synth::FeatureGen f;
    f.name = "b" + std::to_string(i);
    f.kind = FeatureKind::binary;
    f.strength = effects[i];
    spec.features.push_back(f);
  }
  const auto syn = synth::gen_tabular(spec, 6000, 34);
  const Parts p = split_parts(syn.cohort, 35);
  TrainConfig cfg = quick_config(200, 36);
  cfg.degree = 1;
  cfg.constrained = false;
  const auto res = fit_additive({true, false, false}, p.train, p.validation, {}, {}, cfg);
  const double ours = eval::auc(predict_risk(res.model, make_dataset(res.model, p.test)), p.test.labels);

  auto to_matrix = [](const tabular::Cohort& c) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(c.rows()), static_cast<Eigen::Index>(c.cols()));
    for (std::size_t r = 0; r < c.rows(); ++r)
      for (std::size_t j = 0; j < c.cols(); ++j) x(r, j) = c.at(r, j);
    return x;
  };
  const Eigen::MatrixXd xt = to_matrix(p.train);
  Eigen::VectorXd yt(xt.rows());
  for (Eigen::Index i = 0; i < yt.size(); ++i) yt(i) = p.train.labels[i];
  const Eigen::VectorXd beta = tabular::fit_logistic(xt, yt);
  const Eigen::MatrixXd xs = to_matrix(p.test);
  std::vector<double> ref(p.test.rows());
  for (std::size_t r = 0; r < ref.size(); ++r) ref[r] = tabular::logistic_score(beta, xs.row(r).transpose());
  EXPECT_NEAR(ours, eval::auc(ref, p.test.labels), 0.01);
}

TEST(Hierarchy, ConfigsAndFusion) {
  ASSERT_EQ(hierarchy_configs().size(), 4u);
  EXPECT_TRUE(config_flags("cd_edm").edm);
  EXPECT_FALSE(config_flags("cd").edm);
  EXPECT_TRUE(config_flags("all").video);
  EXPECT_THROW(config_flags("nope"), ValidationError);
  const auto syn = synth::gen_tabular(synth::multimodal_spec(), 1500, 37);
  const Parts p = split_parts(syn.cohort, 38);
  std::vector<double> vt, vv;
  for (std::size_t i : p.split.train) vt.push_back(syn.true_logodds[i]);
  for (std::size_t i : p.split.validation) vv.push_back(syn.true_logodds[i]);
  const auto fits = fuse_hierarchy(p.train, p.validation, vt, vv, quick_config(20, 39));
  ASSERT_EQ(fits.size(), 4u);
  EXPECT_EQ(fits[3].first, "all");
  EXPECT_GE(*fits[3].second.model.video_weight, 0.0);
  EXPECT_EQ(fuse_hierarchy(p.train, p.validation, {}, {}, quick_config(12, 39)).size(), 3u);
}

TEST(Serialize, RoundTripIsByteIdentical) {
  const auto syn = synth::gen_tabular(synth::multimodal_spec(), 200, 40);
  const AdditiveRiskModel m = random_model(syn.cohort, {true, true, true}, 41);
  const auto dir = std::filesystem::temp_directory_path() / "seprisk_additive_test";
  std::filesystem::create_directories(dir);
  save_model(dir / "model.json", m);
  const AdditiveRiskModel back = load_model(dir / "model.json");
  EXPECT_EQ(serialize_model(back), serialize_model(m));
  EXPECT_EQ(pack(back), pack(m));
  for (std::size_t i = 0; i < m.scalar_branches.size(); ++i)
    EXPECT_EQ(back.scalar_branches[i].range.max, m.scalar_branches[i].range.max);
  std::filesystem::remove_all(dir);
}

TEST(Serialize, RejectsCorruptFiles) {
  const auto syn = synth::gen_tabular(synth::multimodal_spec(), 200, 42);
  const AdditiveRiskModel m = random_model(syn.cohort, {true, true, false}, 43);
  auto j = to_json(m);
  j["polynomial_branches"][0]["weight"] = -0.5;
  EXPECT_THROW(model_from_json(j), ValidationError);
  j = to_json(m);
  j["version"] = 99;
  EXPECT_THROW(model_from_json(j), ValidationError);
  j = to_json(m);
  j["polynomial_branches"][1]["coefficients"] = {1.0};
  EXPECT_THROW(model_from_json(j), ValidationError);
  j = to_json(m);
  j.erase("bias");
  EXPECT_THROW(model_from_json(j), ValidationError);
  EXPECT_THROW(parse_model("{not json"), ValidationError);
  AdditiveRiskModel unconstrained = m;
  unconstrained.constrained = false;
  unconstrained.scalar_branches[0].weight = -0.5;
  EXPECT_EQ(parse_model(serialize_model(unconstrained)).scalar_branches[0].weight, -0.5);
}
