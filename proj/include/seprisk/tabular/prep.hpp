#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "seprisk/tabular/clean.hpp"
#include "seprisk/tabular/cohort.hpp"
#include "seprisk/tabular/impute_diastolic.hpp"
#include "seprisk/tabular/interpolate.hpp"
#include "seprisk/tabular/mice.hpp"

namespace seprisk::tabular {

struct PrepConfig {
  double missing_threshold = 0.9;  // columns at or above this missing rate are dropped
  MiceConfig mice;
};

struct PrepReport {
  std::size_t outliers_removed = 0;
  std::size_t interpolated = 0;
  std::size_t mice_imputed = 0;
  std::size_t diastolic_imputed = 0;
  std::vector<std::string> dropped_columns;
  std::vector<std::string> warnings;

  std::size_t total_modified() const {
    return outliers_removed + interpolated + mice_imputed + diastolic_imputed;
  }
};

struct PrepResult {
  Cohort cohort;
  PrepReport report;
};

// clean -> per-patient interpolation -> sparse-column filter -> MICE ->
// one-vs-all diastolic imputation.
inline PrepResult prepare_cohort(Cohort cohort, const PrepConfig& cfg = {}) {
  cohort.validate();
  PrepReport rep;
  for (std::size_t c = 0; c < cohort.cols(); ++c) {
    CleanResult res = clean_outliers(cohort.column(c), cohort.specs[c]);
    if (res.all_missing) rep.warnings.push_back("column '" + cohort.specs[c].name + "' is entirely missing");
    rep.outliers_removed += res.flagged;
    cohort.set_column(c, res.values);
  }

  bool have_times = true;
  for (const auto& t : cohort.study_times) have_times &= !t.empty();
  if (have_times) {
    for (std::size_t c = 0; c < cohort.cols(); ++c)
      if (cohort.specs[c].kind == FeatureKind::continuous)
        rep.interpolated += interpolate_patient_series(cohort, c);
  }

  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < cohort.cols(); ++c) {
    std::size_t miss = 0;
    for (std::size_t r = 0; r < cohort.rows(); ++r) miss += is_missing(cohort.at(r, c));
    const double rate = cohort.rows() ? static_cast<double>(miss) / static_cast<double>(cohort.rows()) : 0.0;
    if (rate >= cfg.missing_threshold) rep.dropped_columns.push_back(cohort.specs[c].name);
    else keep.push_back(c);
  }
  if (keep.size() != cohort.cols()) cohort = cohort.select_columns(keep);

  std::vector<std::size_t> mice_cols, ordinal_cols;
  for (std::size_t c = 0; c < cohort.cols(); ++c)
    (cohort.specs[c].kind == FeatureKind::ordinal ? ordinal_cols : mice_cols).push_back(c);
  if (!mice_cols.empty()) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(cohort.rows()), static_cast<Eigen::Index>(mice_cols.size()));
    for (std::size_t r = 0; r < cohort.rows(); ++r)
      for (std::size_t j = 0; j < mice_cols.size(); ++j) m(r, j) = cohort.at(r, mice_cols[j]);
    MiceResult res = mice_impute(m, cfg.mice);
    rep.mice_imputed = res.filled;
    for (std::size_t r = 0; r < cohort.rows(); ++r) {
      for (std::size_t j = 0; j < mice_cols.size(); ++j) {
        double& cell = cohort.at(r, mice_cols[j]);
        if (!is_missing(cell)) continue;
        double v = res.completed(r, j);
        if (cohort.specs[mice_cols[j]].kind == FeatureKind::binary) v = v >= 0.5 ? 1.0 : 0.0;
        cell = v;
      }
    }
  }
  for (std::size_t c : ordinal_cols) rep.diastolic_imputed += impute_diastolic(cohort, c);
  return {std::move(cohort), std::move(rep)};
}

}  // namespace seprisk::tabular
