#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "seprisk/error.hpp"

namespace seprisk::tabular {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) { return std::isnan(v); }

enum class FeatureKind { continuous, binary, ordinal };
enum class Modality { cd, edm };

inline std::string to_string(FeatureKind k) {
  switch (k) {
    case FeatureKind::binary: return "binary";
    case FeatureKind::ordinal: return "ordinal";
    case FeatureKind::continuous: break;
  }
  return "continuous";
}

inline FeatureKind parse_kind(const std::string& s) {
  if (s == "continuous") return FeatureKind::continuous;
  if (s == "binary") return FeatureKind::binary;
  if (s == "ordinal") return FeatureKind::ordinal;
  throw ValidationError("unknown feature kind '" + s + "'");
}

inline std::string to_string(Modality m) { return m == Modality::edm ? "edm" : "cd"; }

inline Modality parse_modality(const std::string& s) {
  if (s == "cd") return Modality::cd;
  if (s == "edm") return Modality::edm;
  throw ValidationError("unknown modality '" + s + "'");
}

struct Limits {
  double lo = 0.0;
  double hi = 0.0;
  std::string units;
  friend bool operator==(const Limits&, const Limits&) = default;
};

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::continuous;
  Modality modality = Modality::cd;
  std::optional<Limits> limits;
  friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

inline const std::unordered_set<std::string>& reserved_columns() {
  static const std::unordered_set<std::string> names{"patient_id", "study_time", "label"};
  return names;
}

inline void validate_specs(std::span<const FeatureSpec> specs) {
  std::unordered_set<std::string> seen;
  for (const FeatureSpec& s : specs) {
    require(!s.name.empty(), "feature spec: empty name");
    require(!reserved_columns().count(s.name), "feature spec: '" + s.name + "' is a reserved column");
    require(seen.insert(s.name).second, "feature spec: duplicate name '" + s.name + "'");
    if (s.limits) require(s.limits->lo < s.limits->hi, "feature spec: limits for '" + s.name + "' need lo < hi");
  }
}

// Tabular cohort: row-major values with NaN as the missing marker.
struct Cohort {
  std::vector<FeatureSpec> specs;
  std::vector<double> values;
  std::vector<int> labels;
  std::vector<std::string> patient_ids;
  std::vector<std::string> study_times;  // ISO-8601 text as read

  std::size_t rows() const { return labels.size(); }
  std::size_t cols() const { return specs.size(); }

  double& at(std::size_t r, std::size_t c) { return values[r * specs.size() + c]; }
  double at(std::size_t r, std::size_t c) const { return values[r * specs.size() + c]; }

  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(values).subspan(r * specs.size(), specs.size());
  }

  std::vector<double> column(std::size_t c) const {
    std::vector<double> out(rows());
    for (std::size_t r = 0; r < rows(); ++r) out[r] = at(r, c);
    return out;
  }

  void set_column(std::size_t c, std::span<const double> v) {
    require(v.size() == rows(), "cohort: column length mismatch");
    for (std::size_t r = 0; r < rows(); ++r) at(r, c) = v[r];
  }

  std::optional<std::size_t> find(const std::string& name) const {
    for (std::size_t i = 0; i < specs.size(); ++i)
      if (specs[i].name == name) return i;
    return std::nullopt;
  }

  std::size_t index_of(const std::string& name) const {
    auto i = find(name);
    require(i.has_value(), "cohort: no feature named '" + name + "'");
    return *i;
  }

  std::size_t missing_count() const {
    std::size_t n = 0;
    for (double v : values) n += is_missing(v);
    return n;
  }

  Cohort subset(std::span<const std::size_t> idx) const {
    Cohort out;
    out.specs = specs;
    out.values.reserve(idx.size() * cols());
    for (std::size_t r : idx) {
      auto rw = row(r);
      out.values.insert(out.values.end(), rw.begin(), rw.end());
      out.labels.push_back(labels[r]);
      out.patient_ids.push_back(patient_ids.empty() ? std::string() : patient_ids[r]);
      out.study_times.push_back(study_times.empty() ? std::string() : study_times[r]);
    }
    return out;
  }

  // Keeps only the listed columns, in the given order.
  Cohort select_columns(std::span<const std::size_t> keep) const {
    Cohort out = *this;
    out.specs.clear();
    for (std::size_t c : keep) out.specs.push_back(specs[c]);
    out.values.assign(rows() * keep.size(), kMissing);
    for (std::size_t r = 0; r < rows(); ++r)
      for (std::size_t j = 0; j < keep.size(); ++j) out.values[r * keep.size() + j] = at(r, keep[j]);
    return out;
  }

  void validate() const {
    validate_specs(specs);
    require(values.size() == rows() * cols(), "cohort: value count does not match rows x features");
    require(patient_ids.size() == rows() && study_times.size() == rows(),
            "cohort: patient/time columns must match row count");
    for (int y : labels) require(y == 0 || y == 1, "cohort: labels must be 0 or 1");
  }
};

}  // namespace seprisk::tabular
