#include "qesn/evaluation.hpp"

namespace qesn {

FieldForecast reconstruct_forecast(const EnsembleForecast& forecast, const EofBasis& basis) {
  FieldForecast out;
  out.members.reserve(forecast.members.size());
  for (const auto& m : forecast.members) out.members.push_back(reconstruct(basis, m));
  out.mean = reconstruct(basis, forecast.mean);
  const double tail = 0.5 * (1.0 - forecast.config.interval_level);
  out.lower = member_quantile(out.members, tail);
  out.upper = member_quantile(out.members, 1.0 - tail);
  return out;
}

ScoreReport score_series(const EnsembleForecast& forecast, const Matrix& truth) {
  ScoreReport r;
  r.overall_mse = mse(forecast.mean, truth);
  r.crps = crps_average(forecast.members, truth);
  r.coverage_95 = interval_coverage(forecast.lower, forecast.upper, truth);
  return r;
}

ScoreReport score_field(const EnsembleForecast& forecast, const FieldTarget& target) {
  const Matrix truth = target.truth.middleRows(forecast.times.begin, forecast.times.size());
  const FieldForecast field = reconstruct_forecast(forecast, target.basis);
  ScoreReport r;
  r.overall_mse = mse(field.mean, truth);
  const Vector regional_truth = nino34_series(truth, target.lats, target.lons, target.region);
  const Vector regional_mean = nino34_series(field.mean, target.lats, target.lons, target.region);
  r.regional_mse = mse(regional_mean, regional_truth);
  r.crps = crps_average(field.members, truth);
  r.coverage_95 = interval_coverage(field.lower, field.upper, truth);
  return r;
}

}  // namespace qesn
