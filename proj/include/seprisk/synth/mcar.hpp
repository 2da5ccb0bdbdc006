#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "seprisk/random.hpp"
#include "seprisk/tabular/cohort.hpp"

namespace seprisk::synth {

struct MaskedMatrix {
  Eigen::MatrixXd values;  // masked cells hold kMissing
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask;  // true where masked
};

// Each cell independently missing with probability `rate`. A column that
// ends up entirely missing is redrawn; after 100 failed draws it is an error.
inline MaskedMatrix mask_mcar(const Eigen::MatrixXd& m, double rate, std::uint64_t seed) {
  require(rate >= 0.0 && rate < 1.0, "mask_mcar: rate must lie in [0, 1)");
  Rng rng(seed);
  MaskedMatrix out{m, Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(m.rows(), m.cols(), false)};
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (int attempt = 0;; ++attempt) {
      require(attempt < 100, "mask_mcar: could not keep column " + std::to_string(j) + " partially observed");
      Eigen::Index kept = 0;
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        out.mask(i, j) = rng.uniform() < rate;
        kept += !out.mask(i, j);
      }
      if (kept > 0 || m.rows() == 0) break;
    }
    for (Eigen::Index i = 0; i < m.rows(); ++i) out.values(i, j) = out.mask(i, j) ? tabular::kMissing : m(i, j);
  }
  return out;
}

}  // namespace seprisk::synth
