#pragma once

#include "qesn/ensemble.hpp"
#include "qesn/evaluation.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qesn {

enum class Objective { OverallMse, RegionalMse };

Objective parse_objective(std::string_view name);
std::string to_string(Objective o);

/// Candidate values; the search covers their Cartesian product.
struct TuningGrid {
  std::vector<int> n_h_values;
  std::vector<double> nu_values;
  std::vector<double> r_v_values;
  std::vector<int> m_values;
  std::vector<double> alpha_values{1.0};
  Objective objective = Objective::OverallMse;

  std::size_t size() const;
  void validate() const;

  /// n_h = 30..105 step 15, nu = 0.05..1.0 step 0.05, r_v in {.001,.005,.01},
  /// m = 2..10 step 2 (1800 points). The nu = 1.0 points violate the echo
  /// state requirement and are reported as failed by grid_search.
  static TuningGrid lorenz_default();
};

struct TuningEntry {
  QesnConfig config;
  double score = 0.0;  // NaN when the grid point failed
  std::string error;

  bool ok() const { return error.empty(); }
};

struct TuningResult {
  QesnConfig best_config;
  double best_score = 0.0;
  std::size_t best_index = 0;
  std::vector<TuningEntry> table;  // grid order: n_h, nu, r_v, m, alpha (last varies fastest)
};

/// Grid configurations in deterministic order, each derived from `base`.
std::vector<QesnConfig> expand_grid(const TuningGrid& grid, const QesnConfig& base);

/// Ties prefer smaller n_h, then smaller m, then larger r_v, then grid order.
bool better_candidate(const TuningEntry& a, std::size_t ia, const TuningEntry& b, std::size_t ib);

/// Fits every grid point on `train`, forecasts `validation` and scores it.
/// Failed points are recorded with their error; the sweep continues.
/// RegionalMse (and field-space OverallMse) need `field`.
TuningResult grid_search(const TuningGrid& grid, const Matrix& responses, const Matrix& inputs, TimeRange train,
                         TimeRange validation, const QesnConfig& base,
                         const std::optional<FieldTarget>& field = std::nullopt, int threads = 0);

}  // namespace qesn
