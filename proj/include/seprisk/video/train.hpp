#pragma once

#include <limits>
#include <numeric>
#include <vector>

#include "seprisk/math.hpp"
#include "seprisk/nn/loss.hpp"
#include "seprisk/nn/rmsprop.hpp"
#include "seprisk/random.hpp"
#include "seprisk/train_config.hpp"
#include "seprisk/video/net.hpp"

namespace seprisk::video {

struct VideoSet {
  std::span<const Tensor> clips;
  std::span<const int> labels;
};

inline std::vector<double> predict_probabilities(VideoNet& net, std::span<const Tensor> clips) {
  std::vector<double> z = net.score_all(clips);
  for (double& v : z) v = sigmoid(v);
  return z;
}

// Trains the standalone video model: class-weighted BCE, RMSProp on mini
// batches, early stopping on validation loss. The net is left at the
// parameters (including running statistics) of the best validation epoch.
inline LossHistory train_video(VideoNet& net, VideoSet train, VideoSet validation,
                               const TrainConfig& cfg) {
  cfg.validate();
  require(!train.clips.empty(), "train_video: empty training set");
  require(train.clips.size() == train.labels.size() &&
              validation.clips.size() == validation.labels.size(),
          "train_video: clip/label count mismatch");
  require(!validation.clips.empty(), "train_video: empty validation set");
  const nn::ClassWeights weights = nn::balanced_class_weights(train.labels);

  LossHistory history;
  if (cfg.max_epochs == 0) return history;

  Rng rng(cfg.seed);
  nn::RmsPropState opt{cfg.optimizer, {}};
  auto params = net.params();
  VideoNet best = net;
  double best_loss = std::numeric_limits<double>::infinity();
  std::size_t stale = 0;

  std::vector<std::size_t> order(train.clips.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t s = 0; s < order.size(); s += cfg.batch_size) {
      const std::size_t e = std::min(order.size(), s + cfg.batch_size);
      std::vector<const Tensor*> batch;
      std::vector<int> labels;
      for (std::size_t i = s; i < e; ++i) {
        batch.push_back(&train.clips[order[i]]);
        labels.push_back(train.labels[order[i]]);
      }
      ForwardCache cache;
      net.zero_grad();
      std::vector<double> z = net.forward(batch, Mode::train, &cache, true);
      std::vector<double> p(z.size());
      for (std::size_t i = 0; i < z.size(); ++i) p[i] = sigmoid(z[i]);
      // Mini-batch gradient of the class-weighted loss, with the batch's weight
      // mass normalised as in the full-set loss.
      std::vector<double> g(z.size());
      double wsum = 0.0;
      for (int y : labels) wsum += weights(y);
      for (std::size_t i = 0; i < z.size(); ++i) g[i] = weights(labels[i]) * (p[i] - labels[i]) / wsum;
      epoch_loss += nn::weighted_bce(p, labels, weights) * static_cast<double>(e - s);
      net.backward(cache, g);
      nn::rmsprop_step(params, opt);
    }
    history.train.push_back(epoch_loss / static_cast<double>(order.size()));
    const std::vector<double> vp = predict_probabilities(net, validation.clips);
    const double val_loss = nn::weighted_bce(vp, validation.labels, weights);
    history.validation.push_back(val_loss);
    if (val_loss < best_loss) {
      best_loss = val_loss;
      best = net;
      history.best_epoch = epoch;
      stale = 0;
    } else if (++stale >= cfg.patience) {
      break;
    }
  }
  net = best;
  return history;
}

}  // namespace seprisk::video
