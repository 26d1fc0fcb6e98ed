#include "qesn/tuning.hpp"

#include "qesn/parallel.hpp"

#include <cmath>
#include <limits>

namespace qesn {

Objective parse_objective(std::string_view name) {
  if (name == "overall_mse") return Objective::OverallMse;
  if (name == "regional_mse") return Objective::RegionalMse;
  throw InvalidArgument("unknown objective '" + std::string(name) + "' (expected overall_mse or regional_mse)");
}

std::string to_string(Objective o) {
  return o == Objective::OverallMse ? "overall_mse" : "regional_mse";
}

std::size_t TuningGrid::size() const {
  return n_h_values.size() * nu_values.size() * r_v_values.size() * m_values.size() * alpha_values.size();
}

void TuningGrid::validate() const {
  using detail::require;
  require(!n_h_values.empty(), "grid.n_h is empty");
  require(!nu_values.empty(), "grid.nu is empty");
  require(!r_v_values.empty(), "grid.r_v is empty");
  require(!m_values.empty(), "grid.m is empty");
  require(!alpha_values.empty(), "grid.alpha is empty");
  for (int v : n_h_values) require(v >= 1, "grid.n_h values must be >= 1");
  // nu = 1 passes here; those points fail individually inside grid_search.
  for (double v : nu_values) require(v > 0.0 && v <= 1.0, "grid.nu values must lie in (0, 1]");
  for (double v : r_v_values) require(v >= 0.0, "grid.r_v values must be >= 0");
  for (int v : m_values) require(v >= 0, "grid.m values must be >= 0");
  for (double v : alpha_values) require(v > 0.0 && v <= 1.0, "grid.alpha values must lie in (0, 1]");
}

TuningGrid TuningGrid::lorenz_default() {
  TuningGrid g;
  for (int q = 0; q <= 5; ++q) g.n_h_values.push_back(30 + 15 * q);
  for (int q = 1; q <= 20; ++q) g.nu_values.push_back(0.05 * q);
  g.r_v_values = {0.001, 0.005, 0.01};
  for (int q = 1; q <= 5; ++q) g.m_values.push_back(2 * q);
  return g;
}

std::vector<QesnConfig> expand_grid(const TuningGrid& grid, const QesnConfig& base) {
  grid.validate();
  std::vector<QesnConfig> out;
  out.reserve(grid.size());
  for (int n_h : grid.n_h_values)
    for (double nu : grid.nu_values)
      for (double r_v : grid.r_v_values)
        for (int m : grid.m_values)
          for (double alpha : grid.alpha_values) {
            QesnConfig c = base;
            c.reservoir.n_h = n_h;
            c.reservoir.nu = nu;
            c.reservoir.alpha = alpha;
            c.r_v = r_v;
            c.embedding.m = m;
            out.push_back(c);
          }
  return out;
}

bool better_candidate(const TuningEntry& a, std::size_t ia, const TuningEntry& b, std::size_t ib) {
  if (a.ok() != b.ok()) return a.ok();
  if (a.score != b.score) return a.score < b.score;
  if (a.config.reservoir.n_h != b.config.reservoir.n_h) return a.config.reservoir.n_h < b.config.reservoir.n_h;
  if (a.config.embedding.m != b.config.embedding.m) return a.config.embedding.m < b.config.embedding.m;
  if (a.config.r_v != b.config.r_v) return a.config.r_v > b.config.r_v;
  return ia < ib;
}

namespace {

double objective_score(const EnsembleForecast& fc, Objective objective, const Matrix& responses,
                       const std::optional<FieldTarget>& field) {
  if (!field) {
    if (objective == Objective::RegionalMse) {
      throw InvalidArgument("grid_search: regional_mse objective needs a gridded field target");
    }
    return mse(fc.mean, responses.middleRows(fc.times.begin, fc.times.size()));
  }
  const Matrix truth = field->truth.middleRows(fc.times.begin, fc.times.size());
  const Matrix mean_field = reconstruct(field->basis, fc.mean);
  if (objective == Objective::OverallMse) return mse(mean_field, truth);
  return mse(nino34_series(mean_field, field->lats, field->lons, field->region),
             nino34_series(truth, field->lats, field->lons, field->region));
}

}  // namespace

TuningResult grid_search(const TuningGrid& grid, const Matrix& responses, const Matrix& inputs, TimeRange train,
                         TimeRange validation, const QesnConfig& base, const std::optional<FieldTarget>& field,
                         int threads) {
  detail::require(!train.empty() && !validation.empty(), "grid_search: empty window");
  detail::require(validation.begin >= train.end, "grid_search: validation window must follow the training window");
  detail::require(validation.end <= responses.rows(), "grid_search: validation window outside the series");
  if (grid.objective == Objective::RegionalMse && !field) {
    throw InvalidArgument("grid_search: regional_mse objective needs a gridded field target");
  }

  const std::vector<QesnConfig> configs = expand_grid(grid, base);
  TuningResult result;
  result.table.resize(configs.size());

  // Parallelize across grid points when there are several, otherwise across members.
  const bool outer = configs.size() > 1;
  parallel_for(configs.size(), outer ? threads : 1, [&](std::size_t i) {
    TuningEntry& entry = result.table[i];
    entry.config = configs[i];
    try {
      const EnsembleForecast fc = run_ensemble(configs[i], responses, inputs, train, validation, outer ? 1 : threads);
      entry.score = objective_score(fc, grid.objective, responses, field);
      if (!std::isfinite(entry.score)) entry.error = "non-finite score";
    } catch (const Error& e) {
      entry.error = e.what();
    }
    if (!entry.ok()) entry.score = std::numeric_limits<double>::quiet_NaN();
  });

  std::size_t best = 0;
  for (std::size_t i = 1; i < result.table.size(); ++i) {
    if (better_candidate(result.table[i], i, result.table[best], best)) best = i;
  }
  if (!result.table[best].ok()) {
    throw Error("grid_search: every grid point failed; first error: " + result.table.front().error);
  }
  result.best_index = best;
  result.best_config = result.table[best].config;
  result.best_score = result.table[best].score;
  return result;
}

}  // namespace qesn
