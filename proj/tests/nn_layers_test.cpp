#include <gtest/gtest.h>

#include <cmath>

#include "seprisk/nn.hpp"
#include "test_support.hpp"

using namespace seprisk;
using namespace seprisk::nn;

TEST(ParamCounts, MatchArchitectureTableRows) {
  EXPECT_EQ(Conv2d::param_count(1, 4), 40u);
  EXPECT_EQ(Conv2d::param_count(4, 4), 148u);
  EXPECT_EQ(BatchNorm::param_count(4).total(), 16u);
  EXPECT_EQ(BatchNorm::param_count(4).trainable, 8u);
  EXPECT_EQ(BatchNorm::param_count(4).non_trainable, 8u);
  EXPECT_EQ(Conv2d::param_count(4, 8), 296u);
  EXPECT_EQ(Conv2d::param_count(8, 8), 584u);
  EXPECT_EQ(BatchNorm::param_count(8).total(), 32u);
  EXPECT_EQ(Lstm::param_count(8, 8), 544u);
  EXPECT_EQ(Lstm::param_count(8, 4), 208u);
  EXPECT_EQ(Dense::param_count(4, 4), 20u);
  EXPECT_EQ(Dense::param_count(4, 1), 5u);
}

TEST(ParamCounts, LayerBuffersAgreeWithFormulas) {
  Conv2d conv("c", 4, 4);
  EXPECT_EQ(count_params(conv.params()).trainable, 148u);
  BatchNorm bn("bn", 4);
  EXPECT_EQ(count_params(bn.params()), (ParamCount{8, 8}));
  Lstm lstm("l", 8, 8);
  EXPECT_EQ(count_params(lstm.params()).trainable, 544u);
  Dense d("d", 4, 1, Activation::sigmoid);
  EXPECT_EQ(count_params(d.params()).trainable, 5u);
}

TEST(Conv2d, CenterIdentityKernelReproducesInput) {
  Rng rng(3);
  Conv2d conv("c", 1, 1);
  conv.weight().value[4] = 1.0;
  Tensor x = test_support::random_tensor({2, 1, 5, 7}, rng);
  EXPECT_EQ(conv.forward(x), x);
}

TEST(Conv2d, ZeroPaddingAtBorders) {
  Conv2d conv("c", 1, 1);
  std::fill(conv.weight().value.begin(), conv.weight().value.end(), 1.0);
  Tensor x({1, 1, 3, 3}, 1.0);
  Tensor y = conv.forward(x);
  EXPECT_DOUBLE_EQ(y.at(0, 0, 0), 4.0);  // corner (flattened first row)
  EXPECT_DOUBLE_EQ(y[4], 9.0);          // center
  EXPECT_DOUBLE_EQ(y[1], 6.0);          // edge
}

TEST(Conv2d, RejectsChannelMismatch) {
  Conv2d conv("c", 4, 4);
  Tensor x({1, 3, 5, 5});
  EXPECT_THROW(conv.forward(x), ValidationError);
}

TEST(BatchNorm, StandardizedInputPassesThroughInTrainMode) {
  BatchNorm bn("bn", 1);
  Tensor x({1, 1, 2, 2}, std::vector<double>{1.0, -1.0, 1.0, -1.0});
  Tensor y = bn.forward(x, Mode::train);
  const double scale = 1.0 / std::sqrt(1.0 + BatchNorm::kEpsilon);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(y[i], x[i] * scale, 1e-15);
  EXPECT_NEAR(y[0], x[0], 1e-3);
}

TEST(BatchNorm, RunningMeanIsExponentialMovingAverage) {
  BatchNorm bn("bn", 2);
  Rng rng(5);
  Tensor a = test_support::random_tensor({3, 2, 4, 4}, rng, 0.0, 2.0);
  Tensor b = test_support::random_tensor({3, 2, 4, 4}, rng, -3.0, 1.0);
  auto channel_mean = [](const Tensor& t, std::size_t c) {
    double s = 0;
    std::size_t cnt = 0;
    for (std::size_t n = 0; n < t.dim(0); ++n)
      for (std::size_t i = 0; i < 16; ++i, ++cnt) s += t[(n * 2 + c) * 16 + i];
    return s / static_cast<double>(cnt);
  };
  bn.forward(a, Mode::train);
  bn.forward(b, Mode::train);
  const double m = BatchNorm::kMomentum;
  for (std::size_t c = 0; c < 2; ++c) {
    const double expected = m * (m * 0.0 + (1 - m) * channel_mean(a, c)) + (1 - m) * channel_mean(b, c);
    EXPECT_NEAR(bn.running_mean().value[c], expected, 1e-14);
    EXPECT_GE(bn.running_var().value[c], 0.0);
  }
}

TEST(BatchNorm, InferBeforeTrainingUsesUnitStatistics) {
  BatchNorm bn("bn", 1);
  Tensor x({1, 1, 1, 3}, std::vector<double>{0.5, 1.0, -2.0});
  Tensor y = bn.forward(x, Mode::infer);
  for (std::size_t i = 0; i < 3; ++i)
    EXPECT_DOUBLE_EQ(y[i], x[i] / std::sqrt(1.0 + BatchNorm::kEpsilon));
}

TEST(MaxPool, ConstantInputGivesConstantOutput) {
  Tensor x({1, 2, 7, 8}, 2.5);
  Tensor y = max_pool(x);
  for (double v : y.data()) EXPECT_EQ(v, 2.5);
}

TEST(MaxPool, CeilingOutputExtent) {
  Tensor x({1, 1, 109, 150});
  Tensor y = max_pool(x);
  EXPECT_EQ(y.dim(2), 37u);
  EXPECT_EQ(y.dim(3), 50u);
}

TEST(MaxPool, SingleWindowRoutesGradientToArgmax) {
  Tensor x({1, 1, 3, 3}, std::vector<double>{1, 2, 3, 4, 9, 6, 7, 8, 5});
  MaxPoolCache cache;
  Tensor y = max_pool(x, &cache);
  ASSERT_EQ(y.size(), 1u);
  EXPECT_EQ(y[0], 9.0);
  Tensor g = max_pool_backward(cache, Tensor({1, 1, 1, 1}, 1.0));
  for (std::size_t i = 0; i < 9; ++i) EXPECT_EQ(g[i], i == 4 ? 1.0 : 0.0);
}

TEST(MaxPool, TiesRouteToFirstOccurrence) {
  Tensor x({1, 1, 2, 2}, 1.0);
  MaxPoolCache cache;
  max_pool(x, &cache);
  Tensor g = max_pool_backward(cache, Tensor({1, 1, 1, 1}, 1.0));
  EXPECT_EQ(g[0], 1.0);
  EXPECT_EQ(g[1] + g[2] + g[3], 0.0);
}

TEST(MaxPool, OutputDominatesWindowMinimum) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Tensor x = test_support::random_tensor({1, 1, 7, 5}, rng);
    Tensor y = max_pool(x);
    for (std::size_t oy = 0; oy < 3; ++oy)
      for (std::size_t ox = 0; ox < 2; ++ox)
        for (std::size_t r = oy * 3; r < std::min<std::size_t>(7, oy * 3 + 3); ++r)
          for (std::size_t c = ox * 3; c < std::min<std::size_t>(5, ox * 3 + 3); ++c)
            EXPECT_GE(y[oy * 2 + ox], x[r * 5 + c]);
  }
}

TEST(Lstm, ZeroParametersGiveZeroOutput) {
  Lstm lstm("l", 3, 4);
  Rng rng(1);
  Tensor x = test_support::random_tensor({5, 3}, rng);
  LstmOutput out = lstm.forward(x);
  for (double v : out.sequence.data()) EXPECT_EQ(v, 0.0);
  for (double v : out.final_cell) EXPECT_EQ(v, 0.0);
}

TEST(Lstm, RejectsEmptySequence) {
  Lstm lstm("l", 2, 2);
  EXPECT_THROW(lstm.forward(Tensor({0, 2})), ValidationError);
}

TEST(Dense, ZeroSigmoidIsHalf) {
  Dense d("d", 4, 1, Activation::sigmoid);
  Tensor y = d.forward(Tensor({1, 4}, 3.0));
  EXPECT_EQ(y[0], 0.5);
}

TEST(Activation, RangeProperties) {
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    const double z = rng.uniform(-40, 40);
    EXPECT_GE(activate(Activation::relu, z), 0.0);
    const double s = activate(Activation::sigmoid, z * 0.5);
    EXPECT_GT(s, 0.0);
    EXPECT_LT(s, 1.0);
  }
}

TEST(WeightedBce, HalfPredictionsGiveLn2) {
  std::vector<double> p{0.5, 0.5, 0.5};
  std::vector<int> y{1, 0, 0};
  EXPECT_NEAR(weighted_bce(p, y, balanced_class_weights(y)), std::log(2.0), 1e-15);
  EXPECT_NEAR(weighted_bce(p, y, ClassWeights{3.0, 0.2}), std::log(2.0), 1e-15);
}

TEST(WeightedBce, PerfectPredictionsAreClamped) {
  std::vector<double> p{1.0, 0.0};
  std::vector<int> y{1, 0};
  const double loss = weighted_bce(p, y, ClassWeights{});
  EXPECT_LE(loss, -std::log(1.0 - 1e-12));
  EXPECT_TRUE(std::isfinite(weighted_bce(std::vector<double>{0.0}, std::vector<int>{1}, {})));
}

TEST(WeightedBce, HandComputedPair) {
  std::vector<double> p{0.9, 0.2};
  std::vector<int> y{1, 0};
  EXPECT_NEAR(weighted_bce(p, y, ClassWeights{}), -(std::log(0.9) + std::log(0.8)) / 2, 1e-15);
  EXPECT_NEAR(weighted_bce(p, y, ClassWeights{}), 0.1643, 5e-5);
}

TEST(WeightedBce, RejectsEmpty) {
  EXPECT_THROW(weighted_bce(std::vector<double>{}, std::vector<int>{}, {}), ValidationError);
}

TEST(WeightedBce, BalancedWeightsEqualiseClassMass) {
  std::vector<int> y{1, 0, 0, 0};
  ClassWeights w = balanced_class_weights(y);
  EXPECT_DOUBLE_EQ(w.positive * 1, w.negative * 3);
  EXPECT_THROW(balanced_class_weights(std::vector<int>{0, 0}), ValidationError);
}

TEST(RmsProp, ZeroGradientLeavesParameters) {
  std::vector<double> theta{1.0, -2.0};
  std::vector<double> g{0.0, 0.0};
  std::vector<double> s;
  rmsprop_step(theta, g, s, {});
  EXPECT_EQ(theta, (std::vector<double>{1.0, -2.0}));
}

TEST(RmsProp, FirstStepFromFreshState) {
  std::vector<double> theta{0.0};
  std::vector<double> g{1.0};
  std::vector<double> s;
  rmsprop_step(theta, g, s, {});
  EXPECT_NEAR(s[0], 0.1, 1e-15);
  EXPECT_NEAR(theta[0], -0.001 / (std::sqrt(0.1) + 1e-7), 1e-15);
  EXPECT_NEAR(theta[0], -0.0031623, 1e-7);
}

TEST(RmsProp, AccumulatorConvergesToSquaredGradient) {
  std::vector<double> theta{0.0};
  std::vector<double> g{-3.0};
  std::vector<double> s;
  for (int i = 0; i < 500; ++i) rmsprop_step(theta, g, s, {});
  EXPECT_NEAR(s[0], 9.0, 1e-12);
}

TEST(RmsProp, RejectsShapeMismatch) {
  std::vector<double> theta{0.0, 1.0};
  std::vector<double> g{1.0};
  std::vector<double> s;
  EXPECT_THROW(rmsprop_step(theta, g, s, {}), ValidationError);
}

TEST(Determinism, RepeatedForwardIsBitIdentical) {
  Rng rng(8);
  Conv2d conv("c", 2, 3);
  conv.init(rng);
  Lstm lstm("l", 3, 2);
  lstm.init(rng);
  Tensor x = test_support::random_tensor({2, 2, 6, 6}, rng);
  Tensor s = test_support::random_tensor({4, 3}, rng);
  EXPECT_EQ(conv.forward(x), conv.forward(x));
  EXPECT_EQ(lstm.forward(s).sequence, lstm.forward(s).sequence);
}
