#pragma once

#include "qesn/ensemble.hpp"
#include "qesn/eof.hpp"
#include "qesn/metrics.hpp"

#include <optional>
#include <vector>

namespace qesn {

/// Maps EOF-coefficient forecasts back to the grid for scoring.
struct FieldTarget {
  EofBasis basis;
  std::vector<double> lats;
  std::vector<double> lons;
  Matrix truth;  // T x n_loc, same time axis as the coefficient series
  LatLonBox region = kNino34Box;
};

/// Member forecasts reconstructed on the grid, with their summaries.
struct FieldForecast {
  std::vector<Matrix> members;  // K x (n_f x n_loc)
  Matrix mean;
  Matrix lower;
  Matrix upper;
};

FieldForecast reconstruct_forecast(const EnsembleForecast& forecast, const EofBasis& basis);

/// Scores a forecast against `truth` rows of the forecast window.
ScoreReport score_series(const EnsembleForecast& forecast, const Matrix& truth);

/// Scores on the reconstructed grid; regional MSE is over the region average.
ScoreReport score_field(const EnsembleForecast& forecast, const FieldTarget& target);

}  // namespace qesn
