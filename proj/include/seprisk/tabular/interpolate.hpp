#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <span>
#include <vector>

#include "seprisk/tabular/cohort.hpp"
#include "seprisk/tabular/time.hpp"

namespace seprisk::tabular {

// Fills interior gaps of one patient's series (times ascending) by linear
// interpolation in time between the nearest observed neighbours. Leading and
// trailing gaps stay missing. Returns the number of filled cells.
inline std::size_t interpolate_series(std::span<const double> times, std::span<double> values) {
  require(times.size() == values.size(), "interpolate: time/value length mismatch");
  std::size_t filled = 0;
  std::size_t prev = values.size();  // index of last observed value
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (is_missing(values[i])) continue;
    if (prev != values.size() && i > prev + 1) {
      const double t0 = times[prev], t1 = times[i], v0 = values[prev], v1 = values[i];
      for (std::size_t k = prev + 1; k < i; ++k) {
        values[k] = t1 > t0 ? v0 + (v1 - v0) * (times[k] - t0) / (t1 - t0) : v0;
        ++filled;
      }
    }
    prev = i;
  }
  return filled;
}

// Per-patient time interpolation of one feature column across the cohort.
// Rows without a study time are left alone.
inline std::size_t interpolate_patient_series(Cohort& cohort, std::size_t col) {
  std::map<std::string, std::vector<std::size_t>> by_patient;
  for (std::size_t r = 0; r < cohort.rows(); ++r)
    if (!cohort.study_times[r].empty()) by_patient[cohort.patient_ids[r]].push_back(r);
  std::size_t filled = 0;
  for (auto& [pid, rows] : by_patient) {
    if (rows.size() < 3) continue;
    std::vector<double> t(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) t[i] = parse_iso8601(cohort.study_times[rows[i]]);
    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return t[a] < t[b]; });
    std::vector<double> ts, vs;
    for (std::size_t k : order) {
      ts.push_back(t[k]);
      vs.push_back(cohort.at(rows[k], col));
    }
    filled += interpolate_series(ts, vs);
    for (std::size_t i = 0; i < order.size(); ++i) cohort.at(rows[order[i]], col) = vs[i];
  }
  return filled;
}

}  // namespace seprisk::tabular
