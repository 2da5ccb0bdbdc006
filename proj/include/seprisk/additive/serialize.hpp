#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "seprisk/additive/model.hpp"
#include "seprisk/io/atomic_file.hpp"

namespace seprisk::additive {

using json = nlohmann::ordered_json;

inline constexpr const char* kModelFormat = "seprisk-additive-model";

namespace detail {

inline json poly_to_json(const PolyBranch& b) {
  return json{{"feature", b.feature},
              {"modality", tabular::to_string(b.modality)},
              {"kind", tabular::to_string(b.kind)},
              {"degree", b.coeffs.size()},
              {"coefficients", b.coeffs},
              {"weight", b.weight},
              {"norm", {{"min", b.range.min}, {"max", b.range.max}}}};
}

template <class T>
T get(const json& j, const char* key, const std::string& where) {
  require(j.is_object() && j.contains(key), "model file: missing '" + std::string(key) + "' in " + where);
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError("model file: bad value for '" + std::string(key) + "' in " + where);
  }
}

inline PolyBranch poly_from_json(const json& j, std::size_t degree, bool constrained) {
  const auto name = get<std::string>(j, "feature", "branch");
  const std::string where = "branch '" + name + "'";
  PolyBranch b;
  b.feature = name;
  b.modality = tabular::parse_modality(get<std::string>(j, "modality", where));
  b.kind = tabular::parse_kind(get<std::string>(j, "kind", where));
  require(b.kind != FeatureKind::binary, "model file: binary feature in polynomial " + where);
  b.coeffs = get<std::vector<double>>(j, "coefficients", where);
  require(get<std::size_t>(j, "degree", where) == degree && b.coeffs.size() == degree,
          "model file: degree mismatch in " + where);
  b.weight = get<double>(j, "weight", where);
  require(!constrained || b.weight >= 0.0, "model file: negative fusion weight in " + where);
  const json norm = j.contains("norm") ? j.at("norm") : json();
  b.range.min = get<double>(norm, "min", where + " norm");
  b.range.max = get<double>(norm, "max", where + " norm");
  require(b.range.max >= b.range.min, "model file: inverted range in " + where);
  return b;
}

}  // namespace detail

inline json to_json(const AdditiveRiskModel& m) {
  json poly = json::array();
  m.for_each_poly([&](const PolyBranch& b, std::size_t) { poly.push_back(detail::poly_to_json(b)); });
  json binary = json::array();
  for (const auto& b : m.binary_branches)
    binary.push_back({{"feature", b.feature}, {"modality", tabular::to_string(b.modality)}, {"weight", b.weight}});
  return json{{"format", kModelFormat},
              {"version", AdditiveRiskModel::kVersion},
              {"modalities", {{"cd", m.modalities.cd}, {"edm", m.modalities.edm}, {"video", m.modalities.video}}},
              {"degree", m.degree},
              {"constrained", m.constrained},
              {"bias", m.bias},
              {"video_weight", m.video_weight ? json(*m.video_weight) : json(nullptr)},
              {"polynomial_branches", poly},
              {"binary_branches", binary}};
}

inline AdditiveRiskModel model_from_json(const json& j) {
  require(j.is_object(), "model file: top level must be an object");
  require(detail::get<std::string>(j, "format", "header") == kModelFormat, "model file: unrecognized format");
  const int version = detail::get<int>(j, "version", "header");
  require(version == AdditiveRiskModel::kVersion, "model file: unsupported version " + std::to_string(version));
  AdditiveRiskModel m;
  const json flags = j.contains("modalities") ? j.at("modalities") : json();
  m.modalities.cd = detail::get<bool>(flags, "cd", "modalities");
  m.modalities.edm = detail::get<bool>(flags, "edm", "modalities");
  m.modalities.video = detail::get<bool>(flags, "video", "modalities");
  m.degree = detail::get<std::size_t>(j, "degree", "header");
  require(m.degree >= 1, "model file: degree must be >= 1");
  m.constrained = detail::get<bool>(j, "constrained", "header");
  m.bias = detail::get<double>(j, "bias", "header");
  require(j.contains("video_weight"), "model file: missing 'video_weight'");
  if (!j.at("video_weight").is_null()) m.video_weight = detail::get<double>(j, "video_weight", "header");
  require(m.modalities.video == m.video_weight.has_value(), "model file: video flag and video weight disagree");
  require(!m.constrained || m.video_weight.value_or(0.0) >= 0.0, "model file: negative video weight");

  require(j.contains("polynomial_branches") && j.at("polynomial_branches").is_array(),
          "model file: missing 'polynomial_branches'");
  for (const json& b : j.at("polynomial_branches")) {
    PolyBranch pb = detail::poly_from_json(b, m.degree, m.constrained);
    require(m.modalities.includes(pb.modality), "model file: branch '" + pb.feature + "' has a disabled modality");
    (pb.modality == Modality::cd ? m.scalar_branches : m.edm_branches).push_back(std::move(pb));
  }
  require(j.contains("binary_branches") && j.at("binary_branches").is_array(),
          "model file: missing 'binary_branches'");
  for (const json& b : j.at("binary_branches")) {
    BinaryBranch bb;
    bb.feature = detail::get<std::string>(b, "feature", "binary branch");
    bb.modality = tabular::parse_modality(detail::get<std::string>(b, "modality", "binary branch"));
    bb.weight = detail::get<double>(b, "weight", "binary branch '" + bb.feature + "'");
    m.binary_branches.push_back(std::move(bb));
  }
  return m;
}

inline std::string serialize_model(const AdditiveRiskModel& m) { return to_json(m).dump(2) + "\n"; }

inline AdditiveRiskModel parse_model(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("model file: ") + e.what());
  }
  return model_from_json(j);
}

inline void save_model(const std::filesystem::path& path, const AdditiveRiskModel& m) {
  io::write_file_atomic(path, serialize_model(m));
}

inline AdditiveRiskModel load_model(const std::filesystem::path& path) { return parse_model(io::read_file(path)); }

}  // namespace seprisk::additive
