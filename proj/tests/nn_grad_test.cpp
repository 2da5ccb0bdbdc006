#include <gtest/gtest.h>

#include "seprisk/nn.hpp"
#include "test_support.hpp"

using namespace seprisk;
using namespace seprisk::nn;
using seprisk::test_support::dot;
using seprisk::test_support::random_tensor;

namespace {

constexpr int kSeeds = 100;
constexpr double kPropertyTolerance = 1e-4;

void zero_grads(const std::vector<Param*>& ps) {
  for (Param* p : ps)
    if (p->trainable) p->zero_grad();
}

// Max relative error over parameters and input for a conv layer probed by
// L = <r, conv(x)>.
double conv_error(std::uint64_t seed, std::size_t cin, std::size_t cout, std::size_t h,
                  std::size_t w) {
  Rng rng(seed);
  Conv2d conv("c", cin, cout);
  conv.init(rng);
  for (double& b : conv.bias().value) b = rng.uniform(-0.5, 0.5);
  Tensor x = random_tensor({2, cin, h, w}, rng);
  Tensor r = random_tensor({2, cout, h, w}, rng);
  zero_grads(conv.params());
  Tensor gx = conv.backward(x, r);
  auto loss = [&] { return dot(r, conv.forward(x)); };
  double err = grad_check(loss, conv.params());
  return std::max(err, grad_check(loss, x.data(), gx.data()));
}

}  // namespace

TEST(GradCheck, DenseLayerBelowOneInAMillion) {
  Rng rng(42);
  for (Activation act : {Activation::none, Activation::sigmoid, Activation::relu}) {
    Dense d("d", 5, 3, act);
    d.init(rng);
    Tensor x = random_tensor({4, 5}, rng);
    Tensor r = random_tensor({4, 3}, rng);
    zero_grads(d.params());
    Tensor out = d.forward(x);
    Tensor gx = d.backward(x, out, r);
    auto loss = [&] { return dot(r, d.forward(x)); };
    EXPECT_LT(grad_check(loss, d.params()), 1e-6);
    EXPECT_LT(grad_check(loss, x.data(), gx.data()), 1e-6);
  }
}

TEST(GradCheck, Conv2dSingleChannel5x5BelowOneInAMillion) {
  EXPECT_LT(conv_error(7, 1, 1, 5, 5), 1e-6);
  EXPECT_LT(conv_error(8, 1, 3, 5, 5), 1e-6);
}

TEST(GradCheck, LstmSmallSequenceBelowOneInOneHundredThousand) {
  Rng rng(19);
  Lstm lstm("l", 2, 2);
  lstm.init(rng);
  for (double& b : lstm.bias().value) b = rng.uniform(-0.5, 0.5);
  Tensor x = random_tensor({3, 2}, rng);
  Tensor r = random_tensor({3, 2}, rng);
  zero_grads(lstm.params());
  LstmCache cache;
  lstm.forward(x, &cache);
  Tensor gx = lstm.backward(cache, r);
  auto loss = [&] { return dot(r, lstm.forward(x).sequence); };
  EXPECT_LT(grad_check(loss, lstm.params()), 1e-5);
  EXPECT_LT(grad_check(loss, x.data(), gx.data()), 1e-5);
}

TEST(GradCheckProperty, Conv2dRandomSeeds) {
  for (int s = 0; s < kSeeds; ++s) {
    const std::size_t cin = 1 + s % 3, cout = 1 + (s / 3) % 3;
    EXPECT_LT(conv_error(1000 + s, cin, cout, 3 + s % 4, 4 + s % 3), kPropertyTolerance) << s;
  }
}

TEST(GradCheckProperty, BatchNormTrainAndInferRandomSeeds) {
  for (int s = 0; s < kSeeds; ++s) {
    Rng rng(2000 + s);
    BatchNorm bn("bn", 2);
    for (double& g : bn.gamma().value) g = rng.uniform(0.5, 1.5);
    for (double& b : bn.beta().value) b = rng.uniform(-0.5, 0.5);
    Tensor x = random_tensor({3, 2, 3, 4}, rng, -2.0, 2.0);
    Tensor r = random_tensor({3, 2, 3, 4}, rng);
    for (Mode mode : {Mode::train, Mode::infer}) {
      zero_grads(bn.params());
      BatchNormCache cache;
      bn.forward(x, mode, &cache, false);
      Tensor gx = bn.backward(cache, r);
      auto loss = [&] { return dot(r, bn.forward(x, mode, nullptr, false)); };
      EXPECT_LT(grad_check(loss, bn.params()), kPropertyTolerance) << s;
      EXPECT_LT(grad_check(loss, x.data(), gx.data()), kPropertyTolerance) << s;
    }
  }
}

TEST(GradCheckProperty, MaxPoolRandomSeeds) {
  for (int s = 0; s < kSeeds; ++s) {
    Rng rng(3000 + s);
    Tensor x = random_tensor({2, 2, std::size_t(4 + s % 5), std::size_t(5 + s % 4)}, rng);
    MaxPoolCache cache;
    Tensor y = max_pool(x, &cache);
    Tensor r = random_tensor(y.shape(), rng);
    Tensor gx = max_pool_backward(cache, r);
    auto loss = [&] { return dot(r, max_pool(x)); };
    EXPECT_LT(grad_check(loss, x.data(), gx.data()), kPropertyTolerance) << s;
  }
}

TEST(GradCheckProperty, ReluRandomSeeds) {
  for (int s = 0; s < kSeeds; ++s) {
    Rng rng(4000 + s);
    Tensor x = random_tensor({1, 1, 4, 4}, rng);
    Tensor r = random_tensor(x.shape(), rng);
    Tensor gx = relu_backward(relu(x), r);
    auto loss = [&] { return dot(r, relu(x)); };
    EXPECT_LT(grad_check(loss, x.data(), gx.data()), kPropertyTolerance) << s;
  }
}

TEST(GradCheckProperty, LstmRandomSeeds) {
  for (int s = 0; s < kSeeds; ++s) {
    Rng rng(5000 + s);
    const std::size_t d = 1 + s % 4, h = 1 + (s / 4) % 4, t = 1 + s % 5;
    Lstm lstm("l", d, h);
    lstm.init(rng);
    for (double& b : lstm.bias().value) b += rng.uniform(-0.5, 0.5);
    Tensor x = random_tensor({t, d}, rng);
    Tensor r = random_tensor({t, h}, rng);
    zero_grads(lstm.params());
    LstmCache cache;
    lstm.forward(x, &cache);
    Tensor gx = lstm.backward(cache, r);
    auto loss = [&] { return dot(r, lstm.forward(x).sequence); };
    EXPECT_LT(grad_check(loss, lstm.params()), kPropertyTolerance) << s;
    EXPECT_LT(grad_check(loss, x.data(), gx.data()), kPropertyTolerance) << s;
  }
}

TEST(GradCheckProperty, DenseRandomSeeds) {
  for (int s = 0; s < kSeeds; ++s) {
    Rng rng(6000 + s);
    const Activation act = s % 3 == 0 ? Activation::none
                           : s % 3 == 1 ? Activation::sigmoid
                                        : Activation::relu;
    Dense d("d", 1 + s % 5, 1 + s % 4, act);
    d.init(rng);
    for (double& b : d.bias().value) b = rng.uniform(-0.5, 0.5);
    Tensor x = random_tensor({3, d.input_dim()}, rng);
    Tensor r = random_tensor({3, d.units()}, rng);
    zero_grads(d.params());
    Tensor out = d.forward(x);
    Tensor gx = d.backward(x, out, r);
    auto loss = [&] { return dot(r, d.forward(x)); };
    EXPECT_LT(grad_check(loss, d.params()), kPropertyTolerance) << s;
    EXPECT_LT(grad_check(loss, x.data(), gx.data()), kPropertyTolerance) << s;
  }
}

TEST(GradCheckProperty, WeightedBceLogitGradient) {
  for (int s = 0; s < kSeeds; ++s) {
    Rng rng(7000 + s);
    std::vector<double> z(6);
    std::vector<int> y{1, 0, 0, 1, 0, 0};
    for (double& v : z) v = rng.uniform(-3, 3);
    const ClassWeights w = balanced_class_weights(y);
    auto probs = [&] {
      std::vector<double> p(z.size());
      for (std::size_t i = 0; i < z.size(); ++i) p[i] = sigmoid(z[i]);
      return p;
    };
    const std::vector<double> g = weighted_bce_logit_grad(probs(), y, w);
    auto loss = [&] { return weighted_bce(probs(), y, w); };
    EXPECT_LT(grad_check(loss, std::span<double>(z), g), kPropertyTolerance) << s;
  }
}

TEST(GradCheck, NonFiniteForwardIsReported) {
  std::vector<double> theta{0.0};
  std::vector<double> g{1.0};
  auto loss = [&] { return theta[0] > 0 ? std::numeric_limits<double>::infinity() : 0.0; };
  EXPECT_THROW(grad_check(loss, std::span<double>(theta), g), std::runtime_error);
}
