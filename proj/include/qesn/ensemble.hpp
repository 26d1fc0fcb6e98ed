#pragma once

#include "qesn/common.hpp"
#include "qesn/embedding.hpp"
#include "qesn/readout.hpp"
#include "qesn/reservoir.hpp"

#include <optional>
#include <span>
#include <vector>

namespace qesn {

/// Full configuration of an ensemble quadratic ESN. The ablations are
/// include_embedding = false (M1), include_quadratic = false (M2) and both
/// (M3, the plain leaky ESN with identity output).
struct QesnConfig {
  ReservoirSpec reservoir;
  EmbeddingSpec embedding;
  double r_v = 0.001;
  int K = 500;
  bool include_quadratic = true;
  bool include_embedding = true;
  bool add_residual_noise = true;
  Index washout = 0;
  double interval_level = 0.95;

  void validate() const;

  /// Embedding actually used; m is forced to 0 without embedding.
  EmbeddingSpec effective_embedding() const;
};

/// One trained member: fixed reservoir, readout and the input normalization.
struct FittedMember {
  ReservoirWeights weights;
  ReadoutWeights readout;
  std::optional<NormalizationStats> stats;
  EmbeddingSpec embedding;
  bool include_quadratic = true;
  bool add_residual_noise = true;
  Index washout = 0;
  TimeRange fit_range;  // times whose hidden states were computed in training
  Vector final_state;   // hidden state at fit_range.end - 1
};

/// Trains member `member_index` on the rows of `train`. The fit starts at the
/// first time whose full lag history lies inside the series. Inputs are taken
/// from `inputs` (same time axis as `responses`).
FittedMember fit_member(const QesnConfig& config, const Matrix& responses, const Matrix& inputs, TimeRange train,
                        int member_index);
inline FittedMember fit_member(const QesnConfig& config, const Matrix& responses, TimeRange train,
                               int member_index) {
  return fit_member(config, responses, responses, train, member_index);
}

/// Forecasts for the times in `forecast` (n_f x n_y). Hidden states continue
/// from the end of training; if the window starts inside the training span
/// the recursion is replayed from the start of the fit instead.
Matrix forecast_member(const FittedMember& member, const Matrix& inputs, TimeRange forecast);

/// Per-cell empirical quantile (type 7) across members.
Matrix member_quantile(std::span<const Matrix> members, double p);

struct EnsembleForecast {
  std::vector<Matrix> members;  // K matrices of n_f x n_y
  Matrix mean;
  Matrix lower;
  Matrix upper;
  QesnConfig config;
  TimeRange times;

  Index n_members() const { return static_cast<Index>(members.size()); }
  Matrix quantile(double p) const { return member_quantile(members, p); }
};

/// Builds mean and central interval bounds from member trajectories.
EnsembleForecast summarize(std::vector<Matrix> members, const QesnConfig& config, TimeRange times);

/// Fits members 1..K and forecasts `forecast`. Members run on up to `threads`
/// workers (0 = machine parallelism); output is identical for any count.
EnsembleForecast run_ensemble(const QesnConfig& config, const Matrix& responses, const Matrix& inputs,
                              TimeRange train, TimeRange forecast, int threads = 0);
inline EnsembleForecast run_ensemble(const QesnConfig& config, const Matrix& responses, TimeRange train,
                                     TimeRange forecast, int threads = 0) {
  return run_ensemble(config, responses, responses, train, forecast, threads);
}

}  // namespace qesn
