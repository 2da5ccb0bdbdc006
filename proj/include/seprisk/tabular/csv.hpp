#pragma once

#include <charconv>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "seprisk/io/atomic_file.hpp"
#include "seprisk/tabular/cohort.hpp"
#include "seprisk/tabular/diastolic.hpp"
#include "seprisk/tabular/time.hpp"

namespace seprisk::tabular {

// Shortest decimal text that round-trips to the same double.
inline std::string format_number(double v) {
  if (is_missing(v)) return {};
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) throw ValidationError("csv line " + std::to_string(line_no) + ": unterminated quote");
  out.push_back(std::move(cur));
  return out;
}

inline std::optional<double> parse_number(const std::string& s) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  while (b < e && *b == ' ') ++b;
  while (e > b && e[-1] == ' ') --e;
  if (b < e && *b == '+') ++b;
  auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q.push_back('"');
    q.push_back(c);
  }
  return q + "\"";
}

}  // namespace detail

// Parses a cohort CSV. Feature columns are matched against `schema` by
// name; columns absent from the schema are typed from their contents
// (binary when every value is 0/1, ordinal when they hold diastolic labels,
// otherwise continuous). Empty fields are missing.
inline Cohort parse_cohort_csv(const std::string& text, const std::vector<FeatureSpec>& schema = {}) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (!line.empty()) {
      header = detail::split_csv_line(line, line_no);
      break;
    }
  }
  require(!header.empty(), "csv: missing header row");
  int pid_col = -1, time_col = -1, label_col = -1;
  std::vector<std::size_t> feature_cols;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "patient_id") pid_col = static_cast<int>(i);
    else if (header[i] == "study_time") time_col = static_cast<int>(i);
    else if (header[i] == "label") label_col = static_cast<int>(i);
    else feature_cols.push_back(i);
  }
  require(label_col >= 0, "csv: header has no 'label' column");

  std::unordered_map<std::string, FeatureSpec> by_name;
  for (const FeatureSpec& s : schema) by_name[s.name] = s;
  for (const FeatureSpec& s : schema) {
    bool present = false;
    for (std::size_t c : feature_cols) present |= header[c] == s.name;
    require(present, "csv: schema feature '" + s.name + "' missing from header");
  }

  std::vector<std::vector<std::string>> raw;
  std::vector<std::size_t> row_lines;
  Cohort cohort;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = detail::split_csv_line(line, line_no);
    require(fields.size() == header.size(), "csv line " + std::to_string(line_no) + ": expected " +
                                                std::to_string(header.size()) + " fields, got " +
                                                std::to_string(fields.size()));
    const std::string& lab = fields[static_cast<std::size_t>(label_col)];
    require(lab == "0" || lab == "1", "csv line " + std::to_string(line_no) + ": label must be 0 or 1");
    cohort.labels.push_back(lab == "1");
    cohort.patient_ids.push_back(pid_col >= 0 ? fields[static_cast<std::size_t>(pid_col)]
                                              : std::to_string(cohort.labels.size()));
    std::string t = time_col >= 0 ? fields[static_cast<std::size_t>(time_col)] : std::string();
    if (!t.empty()) {
      try {
        parse_iso8601(t);
      } catch (const ValidationError& e) {
        throw ValidationError("csv line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    cohort.study_times.push_back(std::move(t));
    std::vector<std::string> feats;
    for (std::size_t c : feature_cols) feats.push_back(std::move(fields[c]));
    raw.push_back(std::move(feats));
    row_lines.push_back(line_no);
  }

  for (std::size_t j = 0; j < feature_cols.size(); ++j) {
    const std::string& name = header[feature_cols[j]];
    FeatureSpec spec;
    if (auto it = by_name.find(name); it != by_name.end()) {
      spec = it->second;
    } else {
      spec.name = name;
      bool all_binary = true, any_text = false;
      for (const auto& r : raw) {
        if (r[j].empty()) continue;
        auto v = detail::parse_number(r[j]);
        if (!v) any_text = true;
        else if (*v != 0.0 && *v != 1.0) all_binary = false;
      }
      spec.kind = any_text ? FeatureKind::ordinal
                           : (all_binary ? FeatureKind::binary : FeatureKind::continuous);
    }
    cohort.specs.push_back(spec);
  }
  validate_specs(cohort.specs);

  const std::size_t p = feature_cols.size();
  cohort.values.assign(raw.size() * p, kMissing);
  for (std::size_t r = 0; r < raw.size(); ++r) {
    for (std::size_t j = 0; j < p; ++j) {
      const std::string& f = raw[r][j];
      if (f.empty()) continue;
      if (auto v = detail::parse_number(f)) {
        cohort.values[r * p + j] = *v;
      } else if (cohort.specs[j].kind == FeatureKind::ordinal) {
        try {
          cohort.values[r * p + j] = encode_diastolic(f);
        } catch (const ValidationError& e) {
          throw ValidationError("csv line " + std::to_string(row_lines[r]) + ": " + e.what());
        }
      } else {
        throw ValidationError("csv line " + std::to_string(row_lines[r]) + ": non-numeric value '" +
                              f + "' in column '" + cohort.specs[j].name + "'");
      }
    }
  }
  return cohort;
}

inline std::string format_cohort_csv(const Cohort& c) {
  std::string out = "patient_id,study_time,label";
  for (const FeatureSpec& s : c.specs) out += "," + detail::quote_if_needed(s.name);
  out += "\n";
  for (std::size_t r = 0; r < c.rows(); ++r) {
    out += detail::quote_if_needed(c.patient_ids[r]) + "," + c.study_times[r] + "," +
           std::to_string(c.labels[r]);
    for (std::size_t j = 0; j < c.cols(); ++j) out += "," + format_number(c.at(r, j));
    out += "\n";
  }
  return out;
}

inline Cohort read_cohort_csv(const std::string& path, const std::vector<FeatureSpec>& schema = {}) {
  return parse_cohort_csv(io::read_file(path), schema);
}

inline void write_cohort_csv(const std::string& path, const Cohort& c) {
  io::write_file_atomic(path, format_cohort_csv(c));
}

}  // namespace seprisk::tabular
