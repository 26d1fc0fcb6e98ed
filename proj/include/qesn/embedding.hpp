#pragma once

#include "qesn/common.hpp"

#include <optional>

namespace qesn {

/// Lead/lag layout of the reservoir input. The input at time t is the series
/// observed `lead` steps earlier, followed by m further copies spaced tau apart.
struct EmbeddingSpec {
  int lead = 6;
  int tau = 1;
  int m = 4;
  bool include_intercept = true;
  bool normalize = true;

  void validate() const;

  /// Oldest offset (in steps before t) that a row at time t reads.
  Index history() const { return static_cast<Index>(lead) + static_cast<Index>(m) * tau; }

  Index width(Index n_x) const { return (static_cast<Index>(m) + 1) * n_x + (include_intercept ? 1 : 0); }
};

struct NormalizationStats {
  Vector means;
  Vector sds;

  Matrix apply(const Matrix& rows) const;
  Vector apply(const Vector& row) const;
};

/// Column means and sample standard deviations (denominator T - 1).
NormalizationStats fit_normalization(const Matrix& training_rows);

/// Rows x~_t for t in `t_range` (zero-based rows of `series`):
///   [1?, x_t, x_{t-tau}, ..., x_{t-m tau}],  x_t := series row (t - lead),
/// standardized with `stats` when spec.normalize is set.
Matrix build_embedded_inputs(const Matrix& series, const EmbeddingSpec& spec,
                             const std::optional<NormalizationStats>& stats, TimeRange t_range);

}  // namespace qesn
