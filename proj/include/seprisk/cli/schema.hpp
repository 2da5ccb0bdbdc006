#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "seprisk/io/atomic_file.hpp"
#include "seprisk/tabular/cohort.hpp"

namespace seprisk::cli {

// Column typing saved next to a cohort CSV, so that re-reading the file does
// not have to guess kinds (ordinal codes look continuous once encoded).
inline nlohmann::ordered_json schema_json(const std::vector<tabular::FeatureSpec>& specs) {
  nlohmann::ordered_json features = nlohmann::ordered_json::array();
  for (const auto& s : specs) {
    nlohmann::ordered_json f = {{"name", s.name}, {"kind", tabular::to_string(s.kind)},
                                {"modality", tabular::to_string(s.modality)}};
    if (s.limits) f["limits"] = {{"lo", s.limits->lo}, {"hi", s.limits->hi}, {"units", s.limits->units}};
    features.push_back(f);
  }
  return {{"format", "seprisk-schema"}, {"version", 1}, {"features", features}};
}

inline std::vector<tabular::FeatureSpec> parse_schema(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    require(j.at("format") == "seprisk-schema", "schema: unrecognized format");
    require(j.at("version") == 1, "schema: unsupported version");
    std::vector<tabular::FeatureSpec> specs;
    for (const auto& f : j.at("features")) {
      tabular::FeatureSpec s;
      s.name = f.at("name").get<std::string>();
      s.kind = tabular::parse_kind(f.at("kind").get<std::string>());
      s.modality = tabular::parse_modality(f.at("modality").get<std::string>());
      if (f.contains("limits") && !f.at("limits").is_null()) {
        const auto& l = f.at("limits");
        s.limits = tabular::Limits{l.at("lo").get<double>(), l.at("hi").get<double>(), l.value("units", "")};
      }
      specs.push_back(std::move(s));
    }
    tabular::validate_specs(specs);
    return specs;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("schema: ") + e.what());
  }
}

// cohort.csv -> cohort.schema.json
inline std::string schema_path_for(const std::string& csv_path) {
  std::filesystem::path p(csv_path);
  return (p.parent_path() / (p.stem().string() + ".schema.json")).string();
}

inline void write_schema(const std::string& path, const std::vector<tabular::FeatureSpec>& specs) {
  io::write_file_atomic(path, schema_json(specs).dump(2) + "\n");
}

// Reads `explicit_path` when given, else the sibling schema of the CSV if it
// exists; an empty result means "infer from the CSV".
inline std::vector<tabular::FeatureSpec> find_schema(const std::string& csv_path, const std::string& explicit_path) {
  if (!explicit_path.empty()) {
    require(std::filesystem::exists(explicit_path), "schema file '" + explicit_path + "' does not exist");
    return parse_schema(io::read_file(explicit_path));
  }
  const std::string sibling = schema_path_for(csv_path);
  if (std::filesystem::exists(sibling)) return parse_schema(io::read_file(sibling));
  return {};
}

}  // namespace seprisk::cli
