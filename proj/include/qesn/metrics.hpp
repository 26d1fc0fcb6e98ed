#pragma once

#include "qesn/common.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qesn {

struct ScoreReport {
  double overall_mse = 0.0;
  std::optional<double> regional_mse;
  double crps = 0.0;
  double coverage_95 = 0.0;

  /// "key=value" lines in a fixed order, full double precision.
  std::string to_text() const;
};

double mse(const Matrix& pred, const Matrix& truth);

/// Ensemble CRPS  (1/K) sum|x_k - y| - c sum_k sum_j |x_k - x_j|
/// with c = 1/(2K^2), or 1/(2K(K-1)) for the fair estimator (K >= 2).
double crps_ensemble(std::span<const double> members, double observation, bool fair = false);

/// crps_ensemble averaged over every (time, variable) cell.
double crps_average(std::span<const Matrix> members, const Matrix& truth, bool fair = false);

/// Fraction of cells with lower <= truth <= upper.
double interval_coverage(const Matrix& lower, const Matrix& upper, const Matrix& truth);

}  // namespace qesn
