#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "seprisk/io/atomic_file.hpp"
#include "seprisk/video/net.hpp"

namespace seprisk::video {

inline constexpr const char* kNetFormat = "seprisk-video-net";

inline nlohmann::ordered_json net_to_json(const VideoNet& net) {
  const VideoNetConfig& c = net.config();
  nlohmann::ordered_json params = nlohmann::ordered_json::array();
  for (const nn::Param* p : net.params())
    params.push_back({{"name", p->name}, {"trainable", p->trainable}, {"values", p->value}});
  return {{"format", kNetFormat},
          {"version", 1},
          {"config",
           {{"frames", c.frames},
            {"height", c.height},
            {"width", c.width},
            {"conv_first", c.conv_first},
            {"conv_second", c.conv_second},
            {"lstm1_hidden", c.lstm1_hidden},
            {"lstm2_hidden", c.lstm2_hidden},
            {"dense_units", c.dense_units}}},
          {"params", params}};
}

inline VideoNet net_from_json(const nlohmann::json& j) {
  try {
    require(j.at("format") == kNetFormat, "video net file: unrecognized format");
    require(j.at("version") == 1, "video net file: unsupported version");
    const auto& jc = j.at("config");
    VideoNetConfig c;
    c.frames = jc.at("frames").get<std::size_t>();
    c.height = jc.at("height").get<std::size_t>();
    c.width = jc.at("width").get<std::size_t>();
    c.conv_first = jc.at("conv_first").get<std::array<std::size_t, 4>>();
    c.conv_second = jc.at("conv_second").get<std::array<std::size_t, 4>>();
    c.lstm1_hidden = jc.at("lstm1_hidden").get<std::size_t>();
    c.lstm2_hidden = jc.at("lstm2_hidden").get<std::size_t>();
    c.dense_units = jc.at("dense_units").get<std::size_t>();
    VideoNet net(c);
    const auto& jp = j.at("params");
    auto params = net.params();
    require(jp.size() == params.size(), "video net file: parameter buffer count mismatch");
    for (std::size_t i = 0; i < params.size(); ++i) {
      require(jp[i].at("name") == params[i]->name, "video net file: unexpected buffer '" +
                                                       jp[i].at("name").get<std::string>() + "'");
      auto values = jp[i].at("values").get<std::vector<double>>();
      require(values.size() == params[i]->size(), "video net file: wrong size for '" + params[i]->name + "'");
      params[i]->value = std::move(values);
    }
    return net;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("video net file: ") + e.what());
  }
}

inline void save_net(const std::string& path, const VideoNet& net) {
  io::write_file_atomic(path, net_to_json(net).dump() + "\n");
}

inline VideoNet load_net(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io::read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("video net file: " + std::string(e.what()));
  }
  return net_from_json(j);
}

}  // namespace seprisk::video
