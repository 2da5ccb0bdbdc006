#pragma once

#include <algorithm>
#include <vector>

#include "seprisk/nn/grad_check.hpp"
#include "seprisk/video/net.hpp"

namespace seprisk::test_support {

// ReLU on/off masks and pooling argmaxes of one forward pass. Equal patterns
// at theta - h and theta + h mean the stencil stays inside one smooth piece.
inline std::vector<std::size_t> activation_pattern(const video::ForwardCache& c) {
  std::vector<std::size_t> p;
  for (const auto& b : c.blocks) {
    for (double v : b.first_out.data()) p.push_back(v > 0.0);
    for (double v : b.second_out.data()) p.push_back(v > 0.0);
    p.insert(p.end(), b.pool.argmax.begin(), b.pool.argmax.end());
  }
  for (double v : c.dense_out.data()) p.push_back(v > 0.0);
  return p;
}

struct NetGradCheck {
  double worst = 0.0;
  std::size_t checked = 0;
  std::size_t skipped = 0;  // stencil crossed a ReLU or pooling switch
};

// Checks d BCE / d theta for the given coordinates of a video net. The
// numeric side differences the loss linearized at theta, sum_i c_i z_i with
// c = dBCE/dz held fixed; its gradient at theta is the BCE gradient.
class VideoNetGradChecker {
 public:
  VideoNetGradChecker(video::VideoNet& net, std::vector<const nn::Tensor*> clips, std::vector<int> labels)
      : net_(net), clips_(std::move(clips)), labels_(std::move(labels)) {
    net_.zero_grad();
    video::ForwardCache cache;
    const auto z = net_.forward(clips_, nn::Mode::train, &cache, false);
    std::vector<double> p(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) p[i] = sigmoid(z[i]);
    dz_ = nn::weighted_bce_logit_grad(p, labels_, {});
    net_.backward(cache, dz_);
  }

  void check(nn::Param& param, std::size_t i, NetGradCheck& out) {
    const double analytic = param.grad[i];
    const double saved = param.value[i];
    param.value[i] = saved + nn::kGradCheckStep;
    const auto [up, up_pattern] = probe();
    param.value[i] = saved - nn::kGradCheckStep;
    const auto [down, down_pattern] = probe();
    param.value[i] = saved;
    if (up_pattern != down_pattern) {
      ++out.skipped;
      return;
    }
    ++out.checked;
    out.worst = std::max(out.worst, nn::relative_error(analytic, (up - down) / (2.0 * nn::kGradCheckStep)));
  }

  void check_all(NetGradCheck& out) {
    for (nn::Param* p : net_.params())
      if (p->trainable)
        for (std::size_t i = 0; i < p->size(); ++i) check(*p, i, out);
  }

 private:
  std::pair<double, std::vector<std::size_t>> probe() {
    video::ForwardCache cache;
    const auto z = net_.forward(clips_, nn::Mode::train, &cache, false);
    double s = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) s += dz_[i] * z[i];
    if (!std::isfinite(s)) throw std::runtime_error("grad check: non-finite forward output");
    return {s, activation_pattern(cache)};
  }

  video::VideoNet& net_;
  std::vector<const nn::Tensor*> clips_;
  std::vector<int> labels_;
  std::vector<double> dz_;
};

}  // namespace seprisk::test_support
