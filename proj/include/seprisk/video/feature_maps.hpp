#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "seprisk/io/atomic_file.hpp"
#include "seprisk/video/net.hpp"

namespace seprisk::video {

struct GrayImage {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> pixels;  // [0, 1]
};

// Feature maps of block `layer` for one frame, each rescaled to [0,1]
// independently. A constant map becomes all zeros.
inline std::vector<GrayImage> feature_maps(VideoNet& net, const Tensor& clip, std::size_t layer,
                                           std::size_t frame) {
  Tensor maps = net.block_maps(clip, layer, frame);
  const std::size_t c = maps.dim(0), h = maps.dim(1), w = maps.dim(2);
  std::vector<GrayImage> out;
  for (std::size_t k = 0; k < c; ++k) {
    auto m = maps.slice(k);
    const auto [lo, hi] = std::minmax_element(m.begin(), m.end());
    GrayImage img{h, w, std::vector<double>(m.size(), 0.0)};
    if (*hi > *lo)
      for (std::size_t p = 0; p < m.size(); ++p) img.pixels[p] = (m[p] - *lo) / (*hi - *lo);
    out.push_back(std::move(img));
  }
  return out;
}

// Binary 8-bit PGM (P5).
inline std::string encode_pgm(const GrayImage& img) {
  std::string out = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  for (double v : img.pixels)
    out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0))));
  return out;
}

// Writes <dir>/<prefix>_map<k>.pgm for each map; returns the paths.
inline std::vector<std::string> export_feature_maps(VideoNet& net, const Tensor& clip,
                                                    std::size_t layer, std::size_t frame,
                                                    const std::string& dir,
                                                    const std::string& prefix = "L") {
  std::vector<std::string> paths;
  const auto maps = feature_maps(net, clip, layer, frame);
  for (std::size_t k = 0; k < maps.size(); ++k) {
    const std::string path = dir + "/" + prefix + std::to_string(layer) + "_frame" +
                             std::to_string(frame) + "_map" + std::to_string(k) + ".pgm";
    io::write_file_atomic(path, encode_pgm(maps[k]));
    paths.push_back(path);
  }
  return paths;
}

}  // namespace seprisk::video
