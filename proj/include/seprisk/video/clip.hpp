#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "seprisk/nn/tensor.hpp"

namespace seprisk::video {

constexpr double kTargetFrameRate = 30.0;
constexpr std::size_t kTargetFrames = 60;

// Grayscale clip [T, H, W]. Pixel values are raw / pixel_scale.
struct RawClip {
  nn::Tensor frames;
  double frame_rate = kTargetFrameRate;
  double pixel_scale = 1.0;
};

struct VideoClip {
  nn::Tensor frames;  // [T, H, W], values in [0, 1]
  double frame_rate = kTargetFrameRate;
  std::string study_id;
};

// Linear temporal resampling to 30 fps, crop to `target_frames` or pad by
// repeating the last frame, then scale pixels into [0, 1].
inline VideoClip preprocess_video(const RawClip& raw, std::size_t target_frames = kTargetFrames) {
  require(raw.frames.rank() == 3, "preprocess: expected [T,H,W] frames");
  require(raw.frames.dim(0) > 0 && raw.frames.size() > 0, "preprocess: empty clip");
  require(raw.frame_rate > 0, "preprocess: frame rate must be positive");
  require(raw.pixel_scale > 0, "preprocess: pixel scale must be positive");
  require(target_frames > 0, "preprocess: target frame count must be positive");
  const std::size_t src_t = raw.frames.dim(0), h = raw.frames.dim(1), w = raw.frames.dim(2);
  const std::size_t plane = h * w;
  const double last = static_cast<double>(src_t - 1);

  // Resampled frame k sits at source position k * fps / 30.
  std::size_t resampled = 1;
  while (static_cast<double>(resampled) * raw.frame_rate / kTargetFrameRate <= last + 1e-9)
    ++resampled;

  nn::Tensor out({target_frames, h, w});
  for (std::size_t k = 0; k < target_frames; ++k) {
    const std::size_t kk = std::min(k, resampled - 1);
    const double pos = std::min(static_cast<double>(kk) * raw.frame_rate / kTargetFrameRate, last);
    std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    double frac = pos - static_cast<double>(lo);
    if (frac < 1e-9) frac = 0.0;
    if (frac > 1.0 - 1e-9) {
      ++lo;
      frac = 0.0;
    }
    const std::size_t hi = std::min(lo + 1, src_t - 1);
    auto a = raw.frames.slice(lo);
    auto b = raw.frames.slice(hi);
    auto dst = out.slice(k);
    for (std::size_t p = 0; p < plane; ++p) {
      const double v = frac == 0.0 ? a[p] : (1.0 - frac) * a[p] + frac * b[p];
      dst[p] = std::clamp(v / raw.pixel_scale, 0.0, 1.0);
    }
  }
  return {std::move(out), kTargetFrameRate, {}};
}

inline VideoClip preprocess_video(const VideoClip& clip, std::size_t target_frames = kTargetFrames) {
  VideoClip out = preprocess_video(RawClip{clip.frames, clip.frame_rate, 1.0}, target_frames);
  out.study_id = clip.study_id;
  return out;
}

}  // namespace seprisk::video
