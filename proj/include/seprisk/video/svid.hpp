#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "seprisk/io/atomic_file.hpp"
#include "seprisk/nn/tensor.hpp"

namespace seprisk::video {

// "SVID" | u32 n_clips, T, H, W (little endian) | n*T*H*W float32 LE in [0,1],
// clip-major, row-major.
namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace detail

inline std::string encode_svid(std::span<const nn::Tensor> clips) {
  require(!clips.empty(), "svid: no clips to write");
  const nn::Shape shape = clips[0].shape();
  require(shape.size() == 3, "svid: clips must be [T,H,W]");
  std::string out = "SVID";
  for (std::size_t d : {clips.size(), shape[0], shape[1], shape[2]})
    detail::put_u32(out, static_cast<std::uint32_t>(d));
  out.reserve(out.size() + clips.size() * clips[0].size() * 4);
  for (const nn::Tensor& c : clips) {
    require(c.shape() == shape, "svid: all clips must share one shape");
    for (double v : c.data()) {
      require(v >= 0.0 && v <= 1.0, "svid: pixel value outside [0,1]");
      detail::put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    }
  }
  return out;
}

inline std::vector<nn::Tensor> decode_svid(const std::string& bytes) {
  require(bytes.size() >= 20 && bytes.compare(0, 4, "SVID") == 0, "svid: bad magic or header");
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t n = detail::get_u32(p + 4), t = detail::get_u32(p + 8),
                    h = detail::get_u32(p + 12), w = detail::get_u32(p + 16);
  const std::size_t per_clip = t * h * w;
  require(bytes.size() == 20 + 4 * n * per_clip,
          "svid: payload size does not match header (" + std::to_string(n) + "x" +
              std::to_string(t) + "x" + std::to_string(h) + "x" + std::to_string(w) + ")");
  std::vector<nn::Tensor> clips;
  clips.reserve(n);
  const unsigned char* q = p + 20;
  for (std::size_t i = 0; i < n; ++i) {
    nn::Tensor c({t, h, w});
    for (std::size_t k = 0; k < per_clip; ++k, q += 4) {
      const float f = std::bit_cast<float>(detail::get_u32(q));
      require(std::isfinite(f) && f >= 0.0f && f <= 1.0f, "svid: pixel value outside [0,1]");
      c[k] = f;
    }
    clips.push_back(std::move(c));
  }
  return clips;
}

inline void write_svid(const std::string& path, std::span<const nn::Tensor> clips) {
  io::write_file_atomic(path, encode_svid(clips));
}

inline std::vector<nn::Tensor> read_svid(const std::string& path) {
  return decode_svid(io::read_file(path));
}

}  // namespace seprisk::video
