#include <gtest/gtest.h>

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <set>

#include "seprisk/eval/auc.hpp"
#include "seprisk/eval/experiment.hpp"
#include "seprisk/eval/ttest.hpp"
#include "seprisk/synth/tabular.hpp"

using namespace seprisk;
using namespace seprisk::eval;

namespace {

double pairwise_auc(const std::vector<double>& s, const std::vector<int>& y) {
  double num = 0, pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      if (y[i] == 1 && y[j] == 0) {
        num += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
        pairs += 1;
      }
  return num / pairs;
}

double boost_p(double t, double dof) {
  boost::math::students_t dist(dof);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

}  // namespace

TEST(Auc, Examples) {
  EXPECT_EQ(auc(std::vector<double>{0.1, 0.2, 0.8, 0.9}, std::vector<int>{0, 0, 1, 1}), 1.0);
  EXPECT_DOUBLE_EQ(auc(std::vector<double>{0.1, 0.4, 0.35, 0.8}, std::vector<int>{0, 0, 1, 1}), 0.75);
  EXPECT_EQ(auc(std::vector<double>(6, 0.3), std::vector<int>{0, 1, 0, 1, 1, 0}), 0.5);
}

TEST(Auc, Errors) {
  EXPECT_THROW(auc(std::vector<double>{1, 2}, std::vector<int>{1, 1}), ValidationError);
  EXPECT_THROW(auc(std::vector<double>{1, 2}, std::vector<int>{1}), ValidationError);
}

TEST(Auc, MatchesPairwiseOracleWithTies) {
  Rng rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + rng.index(199);
    std::vector<double> s(n);
    std::vector<int> y(n);
    const bool coarse = trial % 2 == 0;
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = coarse ? static_cast<double>(rng.index(5)) : rng.normal();
      y[i] = rng.bernoulli(0.4);
    }
    y[0] = 0;
    y[1] = 1;
    EXPECT_NEAR(auc(s, y), pairwise_auc(s, y), 1e-12);
  }
}

TEST(Auc, InvariantUnderIncreasingTransform) {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 50;
    std::vector<double> s(n), t(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = std::round(rng.normal() * 4) / 4;
      t[i] = std::exp(3 * s[i]) + 7;
      y[i] = rng.bernoulli(0.5);
    }
    y[0] = 0;
    y[1] = 1;
    EXPECT_EQ(auc(s, y), auc(t, y));
  }
}

TEST(TTest, HandComputedExample) {
  const std::vector<double> a = {0.82, 0.83, 0.83, 0.83, 0.83}, b = {0.80, 0.80, 0.80, 0.80, 0.80};
  const auto r = paired_ttest(a, b);
  EXPECT_NEAR(r.mean_difference, 0.028, 1e-12);
  EXPECT_NEAR(r.t, 14.0, 1e-9);
  EXPECT_TRUE(r.significant);
}

TEST(TTest, EqualSamplesNotSignificant) {
  const std::vector<double> a = {0.7, 0.71, 0.69, 0.72, 0.7};
  const auto r = paired_ttest(a, a);
  EXPECT_EQ(r.t, 0.0);
  EXPECT_EQ(r.p, 1.0);
  EXPECT_FALSE(r.significant);
}

TEST(TTest, Antisymmetric) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(5), b(5);
    for (int i = 0; i < 5; ++i) a[i] = rng.uniform(0.6, 0.9), b[i] = rng.uniform(0.6, 0.9);
    const auto ab = paired_ttest(a, b), ba = paired_ttest(b, a);
    EXPECT_DOUBLE_EQ(ab.t, -ba.t);
    EXPECT_DOUBLE_EQ(ab.p, ba.p);
  }
}

TEST(TTest, PValueMatchesReferenceDistribution) {
  for (double dof : {1.0, 2.0, 4.0, 9.0, 30.0})
    for (double t : {0.0, 0.1, 0.5, 1.0, 2.0, 4.6041, 8.0, 14.0, 40.0})
      EXPECT_NEAR(student_t_two_sided_p(t, dof), boost_p(t, dof), 1e-10) << "t=" << t << " dof=" << dof;
}

TEST(TTest, ThresholdIsBonferroniCorrected) {
  EXPECT_DOUBLE_EQ(kAlpha, 0.002);
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> a(5), b(5);
    for (int i = 0; i < 5; ++i) a[i] = rng.uniform(0.6, 0.9), b[i] = a[i] - rng.uniform(0.0, 0.05);
    const auto r = paired_ttest(a, b);
    EXPECT_EQ(r.significant, r.p < 0.002);
  }
}

TEST(TTest, ZeroVarianceNonzeroMean) {
  const std::vector<double> a = {0.8, 0.8, 0.8}, b = {0.7, 0.7, 0.7};
  const auto r = paired_ttest(a, b);
  EXPECT_TRUE(std::isinf(r.t));
  EXPECT_GT(r.t, 0);
  EXPECT_TRUE(r.significant);
  EXPECT_THROW(paired_ttest(std::vector<double>{1}, std::vector<double>{1}), ValidationError);
  EXPECT_THROW(paired_ttest(std::vector<double>{1, 2}, std::vector<double>{1}), ValidationError);
}

TEST(Experiment, ReportShapeAndSharedSplits) {
  const auto syn = synth::gen_tabular(synth::multimodal_spec(), 1200, 5);
  ExperimentConfig cfg;
  cfg.seed = 11;
  cfg.additive.max_epochs = 15;
  const ExperimentReport rep = run_experiment(syn.cohort, {}, cfg);
  ASSERT_EQ(rep.runs.size(), 5u);
  std::set<std::vector<std::size_t>> test_sets;
  for (const auto& r : rep.runs) {
    ASSERT_EQ(r.models.size(), 3u);
    EXPECT_EQ(r.models[0].name, "cd");
    EXPECT_EQ(r.models[1].name, "edm");
    EXPECT_EQ(r.models[2].name, "cd_edm");
    EXPECT_EQ(r.logistic.size(), 3u);
    for (const auto& m : r.models) {
      EXPECT_GE(m.auc, 0.0);
      EXPECT_LE(m.auc, 1.0);
      EXPECT_GE(m.min_fusion_weight, 0.0);
    }
    EXPECT_EQ(r.split.train.size() + r.split.validation.size() + r.split.test.size(), 1200u);
    test_sets.insert(r.split.test);
    // a run is reproducible from the config alone
    const RunReport again = run_once(syn.cohort, {}, cfg, r.run_id);
    EXPECT_EQ(again.split.test, r.split.test);
    EXPECT_EQ(again.models[2].auc, r.models[2].auc);
  }
  EXPECT_EQ(test_sets.size(), 5u);
  for (const auto& name : {"cd", "edm", "cd_edm"}) EXPECT_EQ(rep.aucs(name).size(), 5u);
  // only pairs with both members present are tested
  ASSERT_EQ(rep.comparisons.size(), 2u);
  EXPECT_EQ(rep.comparisons[0].model_a, "cd");
  EXPECT_EQ(rep.comparisons[0].model_b, "edm");
  EXPECT_EQ(rep.comparisons[1].model_b, "cd_edm");

  const std::string table = render_table(rep);
  EXPECT_NE(table.find("CD+EDM"), std::string::npos);
  EXPECT_NE(table.find("Paired t-tests"), std::string::npos);
  const auto js = report_json(rep, cfg);
  EXPECT_EQ(js["format"], "seprisk-metrics");
  EXPECT_EQ(js["runs"], 5);
  EXPECT_EQ(js["per_run"].size(), 5u);
  EXPECT_EQ(js["summary"]["cd"]["aucs"].size(), 5u);
}

TEST(Experiment, ConfigValidation) {
  ExperimentConfig cfg;
  cfg.models = {"cd", "nonsense"};
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg.models = {"cd"};
  cfg.runs = 0;
  EXPECT_THROW(cfg.validate(), ValidationError);
}
