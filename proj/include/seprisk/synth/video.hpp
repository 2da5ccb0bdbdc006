#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "seprisk/math.hpp"
#include "seprisk/nn/tensor.hpp"
#include "seprisk/random.hpp"

namespace seprisk::synth {

struct VideoDims {
  std::size_t frames = 12;
  std::size_t height = 28;
  std::size_t width = 38;
};

struct SyntheticVideos {
  std::vector<nn::Tensor> clips;
  std::vector<int> labels;
  std::vector<double> latent;
  std::vector<double> true_prob;
};

// A Gaussian blob circling the frame centre over a noisy background. Its
// amplitude grows with the latent risk value.
inline nn::Tensor render_clip(double latent, const VideoDims& d, Rng& rng) {
  nn::Tensor clip({d.frames, d.height, d.width});
  const double amplitude = 0.1 + 0.8 * sigmoid(1.5 * latent);
  const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double sigma = 0.15 * static_cast<double>(std::min(d.height, d.width));
  const double h = static_cast<double>(d.height), w = static_cast<double>(d.width);
  for (std::size_t t = 0; t < d.frames; ++t) {
    const double angle = phase + 2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(d.frames);
    const double cy = 0.5 * h + 0.2 * h * std::sin(angle);
    const double cx = 0.5 * w + 0.2 * w * std::cos(angle);
    for (std::size_t y = 0; y < d.height; ++y) {
      for (std::size_t x = 0; x < d.width; ++x) {
        const double dy = static_cast<double>(y) - cy, dx = static_cast<double>(x) - cx;
        const double blob = amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
        const double v = 0.05 + blob + 0.03 * rng.normal();
        clip.at(t, y, x) = std::clamp(v, 0.0, 1.0);
      }
    }
  }
  return clip;
}

// Clips from latent ~ N(0,1); label ~ Bernoulli(sigmoid(signal_strength * latent)).
inline SyntheticVideos gen_videos(std::size_t n, const VideoDims& dims, double signal_strength,
                                  std::uint64_t seed) {
  Rng rng(seed);
  SyntheticVideos out;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = rng.normal();
    const double p = sigmoid(signal_strength * z);
    out.latent.push_back(z);
    out.true_prob.push_back(p);
    out.labels.push_back(rng.bernoulli(p) ? 1 : 0);
    out.clips.push_back(render_clip(z, dims, rng));
  }
  return out;
}

// Renders clips for given latent values (the tabular generator supplies them).
inline std::vector<nn::Tensor> render_clips(std::span<const double> latent, const VideoDims& dims,
                                            std::uint64_t seed) {
  Rng rng(seed);
  std::vector<nn::Tensor> clips;
  for (double z : latent) clips.push_back(render_clip(z, dims, rng));
  return clips;
}

}  // namespace seprisk::synth
