#pragma once

#include <array>
#include <string>
#include <vector>

#include "seprisk/math.hpp"
#include "seprisk/nn.hpp"
#include "seprisk/random.hpp"

namespace seprisk::video {

using nn::Mode;
using nn::Tensor;

// Layer widths of the per-frame CNN + LSTM scorer. Each of the four blocks
// holds two 3x3 conv+ReLU sublayers, batch norm and 3x3 max pooling.
struct VideoNetConfig {
  std::size_t frames = 60;
  std::size_t height = 109;
  std::size_t width = 150;
  std::array<std::size_t, 4> conv_first{4, 8, 8, 8};
  std::array<std::size_t, 4> conv_second{4, 8, 8, 8};
  std::size_t lstm1_hidden = 8;
  std::size_t lstm2_hidden = 4;
  std::size_t dense_units = 4;

  // Reduced resolution used for desk-scale training and tests.
  static VideoNetConfig desk() {
    VideoNetConfig c;
    c.frames = 12;
    c.height = 28;
    c.width = 38;
    return c;
  }

  void validate() const {
    require(frames >= 1, "video net: need at least one frame");
    std::size_t h = height, w = width;
    for (int i = 0; i < 4; ++i) {
      h = nn::pooled_extent(h);
      w = nn::pooled_extent(w);
    }
    require(h >= 1 && w >= 1, "video net: spatial dims collapse to zero after four pools");
    for (std::size_t i = 0; i < 4; ++i)
      require(conv_first[i] > 0 && conv_second[i] > 0, "video net: channel counts must be positive");
    require(lstm1_hidden > 0 && lstm2_hidden > 0 && dense_units > 0,
            "video net: recurrent/dense widths must be positive");
  }

  friend bool operator==(const VideoNetConfig&, const VideoNetConfig&) = default;
};

// Closed-form parameter count; resolution independent.
inline nn::ParamCount param_count(const VideoNetConfig& c) {
  nn::ParamCount total;
  std::size_t channels = 1;
  for (std::size_t i = 0; i < 4; ++i) {
    total.trainable += nn::Conv2d::param_count(channels, c.conv_first[i]);
    total.trainable += nn::Conv2d::param_count(c.conv_first[i], c.conv_second[i]);
    total += nn::BatchNorm::param_count(c.conv_second[i]);
    channels = c.conv_second[i];
  }
  total.trainable += nn::Lstm::param_count(channels, c.lstm1_hidden);
  total.trainable += nn::Lstm::param_count(c.lstm1_hidden, c.lstm2_hidden);
  total.trainable += nn::Dense::param_count(c.lstm2_hidden, c.dense_units);
  total.trainable += nn::Dense::param_count(c.dense_units, 1);
  return total;
}

struct LayerRow {
  std::string name;
  std::size_t params = 0;
};

// Per-layer parameter table in network order.
inline std::vector<LayerRow> layer_table(const VideoNetConfig& c) {
  std::vector<LayerRow> rows;
  std::size_t channels = 1;
  int conv = 1;
  for (std::size_t i = 0; i < 4; ++i) {
    const std::string block = "L" + std::to_string(i + 1);
    rows.push_back({block + ": Conv" + std::to_string(conv++) + "+ReLU",
                    nn::Conv2d::param_count(channels, c.conv_first[i])});
    rows.push_back({block + ": Conv" + std::to_string(conv++) + "+ReLU",
                    nn::Conv2d::param_count(c.conv_first[i], c.conv_second[i])});
    rows.push_back({block + ": Batch norm.", nn::BatchNorm::param_count(c.conv_second[i]).total()});
    channels = c.conv_second[i];
  }
  rows.push_back({"LSTM", nn::Lstm::param_count(channels, c.lstm1_hidden)});
  rows.push_back({"LSTM", nn::Lstm::param_count(c.lstm1_hidden, c.lstm2_hidden)});
  rows.push_back({"Dense+ReLU", nn::Dense::param_count(c.lstm2_hidden, c.dense_units)});
  rows.push_back({"Output+Sigmoid", nn::Dense::param_count(c.dense_units, 1)});
  return rows;
}

struct ConvBlock {
  nn::Conv2d first;
  nn::Conv2d second;
  nn::BatchNorm norm;
};

struct BlockCache {
  Tensor input;
  Tensor first_out;
  Tensor second_out;
  nn::BatchNormCache norm;
  nn::MaxPoolCache pool;
};

struct ForwardCache {
  std::size_t clips = 0;
  std::array<BlockCache, 4> blocks;
  nn::Shape pooled_shape;
  std::vector<nn::LstmCache> lstm1;
  std::vector<nn::LstmCache> lstm2;
  Tensor dense_in;
  Tensor dense_out;
  Tensor head_out;
};

struct VideoScore {
  double pre_activation = 0.0;
  double probability = 0.5;
};

class VideoNet {
 public:
  VideoNet() : VideoNet(VideoNetConfig{}) {}
  explicit VideoNet(const VideoNetConfig& config) : config_(config) {
    config_.validate();
    std::size_t channels = 1;
    int conv = 1;
    for (std::size_t i = 0; i < 4; ++i) {
      const std::string block = "L" + std::to_string(i + 1);
      blocks_[i].first = nn::Conv2d(block + ".conv" + std::to_string(conv++), channels,
                                    config.conv_first[i]);
      blocks_[i].second = nn::Conv2d(block + ".conv" + std::to_string(conv++),
                                     config.conv_first[i], config.conv_second[i]);
      blocks_[i].norm = nn::BatchNorm(block + ".bn", config.conv_second[i]);
      channels = config.conv_second[i];
    }
    lstm1_ = nn::Lstm("lstm1", channels, config.lstm1_hidden);
    lstm2_ = nn::Lstm("lstm2", config.lstm1_hidden, config.lstm2_hidden);
    dense_ = nn::Dense("dense", config.lstm2_hidden, config.dense_units, nn::Activation::relu);
    head_ = nn::Dense("output", config.dense_units, 1, nn::Activation::none);
  }

  VideoNet(const VideoNet& o) : VideoNet(o.config_) { copy_values_from(o); }
  VideoNet& operator=(const VideoNet& o) {
    if (this != &o) {
      *this = VideoNet(o.config_);
      copy_values_from(o);
    }
    return *this;
  }
  VideoNet(VideoNet&&) = default;
  VideoNet& operator=(VideoNet&&) = default;

  const VideoNetConfig& config() const { return config_; }

  void init(std::uint64_t seed) {
    Rng rng(seed);
    for (auto& b : blocks_) {
      b.first.init(rng);
      b.second.init(rng);
      b.norm.reset();
    }
    lstm1_.init(rng);
    lstm2_.init(rng);
    dense_.init(rng);
    head_.init(rng);
  }

  std::vector<nn::Param*> params() {
    std::vector<nn::Param*> out;
    auto append = [&](std::vector<nn::Param*> ps) { out.insert(out.end(), ps.begin(), ps.end()); };
    for (auto& b : blocks_) {
      append(b.first.params());
      append(b.second.params());
      append(b.norm.params());
    }
    append(lstm1_.params());
    append(lstm2_.params());
    append(dense_.params());
    append(head_.params());
    return out;
  }
  std::vector<const nn::Param*> params() const {
    auto ps = const_cast<VideoNet*>(this)->params();
    return {ps.begin(), ps.end()};
  }

  nn::ParamCount count() const {
    nn::ParamCount c;
    for (const nn::Param* p : params()) (p->trainable ? c.trainable : c.non_trainable) += p->size();
    return c;
  }

  void zero_grad() {
    for (nn::Param* p : params())
      if (p->trainable) p->zero_grad();
  }

  // Stacks every frame of every clip into a [N*T, 1, H, W] batch.
  Tensor frame_batch(std::span<const Tensor* const> clips) const {
    const std::size_t t = config_.frames, h = config_.height, w = config_.width;
    Tensor x({clips.size() * t, 1, h, w});
    for (std::size_t i = 0; i < clips.size(); ++i) {
      const Tensor& c = *clips[i];
      require(c.shape() == nn::Shape({t, h, w}),
              "video net: clip shape " + nn::shape_string(c.shape()) + " does not match config " +
                  nn::shape_string({t, h, w}));
      std::copy(c.data().begin(), c.data().end(), x.data().begin() + i * t * h * w);
    }
    return x;
  }

  // Runs the CNN blocks on a frame batch; returns the pooled maps of the last block.
  Tensor run_blocks(Tensor x, Mode mode, ForwardCache* cache, bool update_stats,
                    std::size_t upto = 4) {
    for (std::size_t i = 0; i < upto; ++i) {
      ConvBlock& b = blocks_[i];
      BlockCache* bc = cache ? &cache->blocks[i] : nullptr;
      Tensor a = nn::relu(b.first.forward(x));
      Tensor s = nn::relu(b.second.forward(a));
      Tensor n = b.norm.forward(s, mode, bc ? &bc->norm : nullptr, update_stats);
      Tensor p = nn::max_pool(n, bc ? &bc->pool : nullptr);
      if (bc) {
        bc->input = std::move(x);
        bc->first_out = std::move(a);
        bc->second_out = std::move(s);
      }
      x = std::move(p);
    }
    return x;
  }

  // Per-frame feature vectors [N*T, C]: spatial mean of the final maps.
  static Tensor global_average(const Tensor& pooled) {
    const std::size_t n = pooled.dim(0), c = pooled.dim(1), plane = pooled.dim(2) * pooled.dim(3);
    Tensor f({n, c});
    for (std::size_t i = 0; i < n * c; ++i) {
      double s = 0.0;
      for (std::size_t p = 0; p < plane; ++p) s += pooled[i * plane + p];
      f[i] = s / static_cast<double>(plane);
    }
    return f;
  }

  Tensor frame_features(std::span<const Tensor* const> clips, Mode mode) {
    return global_average(run_blocks(frame_batch(clips), mode, nullptr, false));
  }

  // Pre-sigmoid scores for a batch of clips.
  std::vector<double> forward(std::span<const Tensor* const> clips, Mode mode,
                              ForwardCache* cache = nullptr, bool update_stats = true) {
    const std::size_t t = config_.frames;
    Tensor pooled = run_blocks(frame_batch(clips), mode, cache, update_stats);
    Tensor feats = global_average(pooled);
    const std::size_t c = feats.dim(1);
    Tensor dense_in({clips.size(), config_.lstm2_hidden});
    if (cache) {
      cache->clips = clips.size();
      cache->pooled_shape = pooled.shape();
      cache->lstm1.assign(clips.size(), {});
      cache->lstm2.assign(clips.size(), {});
    }
    for (std::size_t i = 0; i < clips.size(); ++i) {
      Tensor seq({t, c});
      std::copy_n(feats.data().begin() + i * t * c, t * c, seq.data().begin());
      nn::LstmOutput o1 = lstm1_.forward(seq, cache ? &cache->lstm1[i] : nullptr);
      nn::LstmOutput o2 = lstm2_.forward(o1.sequence, cache ? &cache->lstm2[i] : nullptr);
      for (std::size_t j = 0; j < config_.lstm2_hidden; ++j)
        dense_in.at(i, j) = o2.sequence.at(t - 1, j);
    }
    Tensor dense_out = dense_.forward(dense_in);
    Tensor head_out = head_.forward(dense_out);
    std::vector<double> z(head_out.data().begin(), head_out.data().end());
    if (cache) {
      cache->dense_in = std::move(dense_in);
      cache->dense_out = std::move(dense_out);
      cache->head_out = std::move(head_out);
    }
    return z;
  }

  // Accumulates parameter gradients given dL/dz for each clip's score.
  void backward(ForwardCache& cache, std::span<const double> grad_scores) {
    const std::size_t n = cache.clips, t = config_.frames;
    require(grad_scores.size() == n, "video net: gradient count mismatch");
    Tensor g_head({n, 1}, std::vector<double>(grad_scores.begin(), grad_scores.end()));
    Tensor g_dense = head_.backward(cache.dense_out, cache.head_out, g_head);
    Tensor g_last = dense_.backward(cache.dense_in, cache.dense_out, g_dense);
    const std::size_t c = cache.pooled_shape[1];
    Tensor g_feats({n * t, c});
    for (std::size_t i = 0; i < n; ++i) {
      Tensor g2({t, config_.lstm2_hidden});
      for (std::size_t j = 0; j < config_.lstm2_hidden; ++j) g2.at(t - 1, j) = g_last.at(i, j);
      Tensor g1 = lstm2_.backward(cache.lstm2[i], g2);
      Tensor g0 = lstm1_.backward(cache.lstm1[i], g1);
      std::copy(g0.data().begin(), g0.data().end(), g_feats.data().begin() + i * t * c);
    }
    const std::size_t plane = cache.pooled_shape[2] * cache.pooled_shape[3];
    Tensor g(cache.pooled_shape);
    for (std::size_t k = 0; k < g_feats.size(); ++k)
      for (std::size_t p = 0; p < plane; ++p) g[k * plane + p] = g_feats[k] / static_cast<double>(plane);
    for (std::size_t i = 4; i-- > 0;) {
      ConvBlock& b = blocks_[i];
      BlockCache& bc = cache.blocks[i];
      g = nn::max_pool_backward(bc.pool, g);
      g = b.norm.backward(bc.norm, g);
      g = nn::relu_backward(bc.second_out, std::move(g));
      g = b.second.backward(bc.first_out, g);
      g = nn::relu_backward(bc.first_out, std::move(g));
      g = b.first.backward(bc.input, g);
    }
  }

  VideoScore score(const Tensor& clip) {
    const Tensor* p = &clip;
    const double z = forward(std::span<const Tensor* const>(&p, 1), Mode::infer)[0];
    return {z, sigmoid(z)};
  }

  std::vector<double> score_all(std::span<const Tensor> clips, std::size_t batch = 16) {
    std::vector<double> out;
    out.reserve(clips.size());
    for (std::size_t s = 0; s < clips.size(); s += batch) {
      std::vector<const Tensor*> ptrs;
      for (std::size_t i = s; i < std::min(clips.size(), s + batch); ++i) ptrs.push_back(&clips[i]);
      auto z = forward(ptrs, Mode::infer);
      out.insert(out.end(), z.begin(), z.end());
    }
    return out;
  }

  // Outputs of the first conv+ReLU sublayer of block `layer` (1..4) for one
  // frame, inference mode. Shape [C, h, w].
  Tensor block_maps(const Tensor& clip, std::size_t layer, std::size_t frame) {
    require(layer >= 1 && layer <= 4, "feature maps: layer must be in 1..4");
    require(clip.rank() == 3 && frame < clip.dim(0), "feature maps: frame index out of range");
    require(clip.dim(1) == config_.height && clip.dim(2) == config_.width,
            "feature maps: clip dims do not match config");
    Tensor x({1, 1, config_.height, config_.width});
    std::copy_n(clip.slice(frame).begin(), config_.height * config_.width, x.data().begin());
    x = run_blocks(std::move(x), Mode::infer, nullptr, false, layer - 1);
    Tensor maps = nn::relu(blocks_[layer - 1].first.forward(x));
    return std::move(maps).reshaped({maps.dim(1), maps.dim(2), maps.dim(3)});
  }

  ConvBlock& block(std::size_t i) { return blocks_.at(i); }
  nn::Lstm& lstm1() { return lstm1_; }
  nn::Lstm& lstm2() { return lstm2_; }
  nn::Dense& dense() { return dense_; }
  nn::Dense& head() { return head_; }

 private:
  void copy_values_from(const VideoNet& o) {
    auto dst = params();
    auto src = o.params();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i]->value = src[i]->value;
  }

  VideoNetConfig config_;
  std::array<ConvBlock, 4> blocks_;
  nn::Lstm lstm1_;
  nn::Lstm lstm2_;
  nn::Dense dense_;
  nn::Dense head_;
};

}  // namespace seprisk::video
