#include "qesn/ensemble.hpp"

#include "qesn/parallel.hpp"
#include "qesn/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qesn {

void QesnConfig::validate() const {
  reservoir.validate();
  embedding.validate();
  detail::require(r_v >= 0.0, "ensemble.r_v must be non-negative");
  detail::require(K >= 1, "ensemble.K must be >= 1");
  detail::require(washout >= 0, "ensemble.washout must be non-negative");
  detail::require(interval_level > 0.0 && interval_level < 1.0, "ensemble.interval_level must lie in (0, 1)");
}

EmbeddingSpec QesnConfig::effective_embedding() const {
  EmbeddingSpec e = embedding;
  if (!include_embedding) e.m = 0;
  return e;
}

FittedMember fit_member(const QesnConfig& config, const Matrix& responses, const Matrix& inputs, TimeRange train,
                        int member_index) {
  config.validate();
  if (inputs.rows() != responses.rows()) {
    throw DimensionMismatch("fit_member: inputs have " + std::to_string(inputs.rows()) + " rows, responses " +
                            std::to_string(responses.rows()));
  }
  detail::require(train.begin >= 0 && train.end <= responses.rows() && !train.empty(),
                  "fit_member: training window outside the series");

  FittedMember member;
  member.embedding = config.effective_embedding();
  member.include_quadratic = config.include_quadratic;
  member.add_residual_noise = config.add_residual_noise;
  member.washout = config.washout;
  member.fit_range = {std::max(train.begin, member.embedding.history()), train.end};
  if (member.fit_range.size() <= config.washout) {
    throw InsufficientHistory("fit_member: training window [" + std::to_string(train.begin) + ", " +
                              std::to_string(train.end) + ") leaves no rows after lag history " +
                              std::to_string(member.embedding.history()) + " and washout " +
                              std::to_string(config.washout));
  }

  if (member.embedding.normalize) {
    member.stats = fit_normalization(inputs.middleRows(train.begin, train.size()));
  }
  const Matrix x = build_embedded_inputs(inputs, member.embedding, member.stats, member.fit_range);
  member.weights = generate_weights(config.reservoir, x.cols(), member_index);
  const HiddenStateSequence seq =
      run_reservoir(member.weights, x, Vector::Zero(config.reservoir.n_h), config.washout);
  member.readout = fit_readout(seq.states, responses.middleRows(member.fit_range.begin, member.fit_range.size()),
                               config.r_v, config.washout, config.include_quadratic);
  member.final_state = seq.states.row(seq.states.rows() - 1).transpose();
  return member;
}

Matrix forecast_member(const FittedMember& member, const Matrix& inputs, TimeRange forecast) {
  if (forecast.empty()) return Matrix(0, member.readout.n_y());
  if (forecast.begin < member.fit_range.begin) {
    throw InsufficientHistory("forecast_member: window starts at " + std::to_string(forecast.begin) +
                              ", before the first fitted time " + std::to_string(member.fit_range.begin));
  }

  // Continue from the end-of-training state, or replay the training recursion
  // when the window reaches back into the training span.
  Index start = member.fit_range.end;
  Vector h = member.final_state;
  if (forecast.begin < member.fit_range.end) {
    start = member.fit_range.begin;
    h = Vector::Zero(member.weights.n_h());
  }
  const Matrix x = build_embedded_inputs(inputs, member.embedding, member.stats, {start, forecast.end});
  const HiddenStateSequence seq = run_reservoir(member.weights, x, h);
  Matrix out = predict(member.readout, seq.states.bottomRows(forecast.size()), member.include_quadratic);

  if (member.add_residual_noise) {
    Rng rng(member.weights.spec.seed, StreamTag::ResidualNoise,
            static_cast<std::uint64_t>(member.weights.member_index));
    const Vector sd = member.readout.R_diag.cwiseSqrt();
    for (Index t = 0; t < out.rows(); ++t) {
      for (Index j = 0; j < out.cols(); ++j) out(t, j) += sd(j) * rng.normal();
    }
  }
  return out;
}

Matrix member_quantile(std::span<const Matrix> members, double p) {
  if (members.empty()) throw EmptyEnsemble("member_quantile: no members");
  detail::require(p >= 0.0 && p <= 1.0, "member_quantile: p must lie in [0, 1]");
  const Index rows = members.front().rows();
  const Index cols = members.front().cols();
  for (const auto& m : members) {
    if (m.rows() != rows || m.cols() != cols) throw DimensionMismatch("member_quantile: ragged members");
  }
  const std::size_t k = members.size();
  const double h = static_cast<double>(k - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, k - 1);
  const double frac = h - static_cast<double>(lo);

  Matrix out(rows, cols);
  std::vector<double> values(k);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      for (std::size_t m = 0; m < k; ++m) values[m] = members[m](i, j);
      std::sort(values.begin(), values.end());
      out(i, j) = values[lo] + frac * (values[hi] - values[lo]);
    }
  }
  return out;
}

EnsembleForecast summarize(std::vector<Matrix> members, const QesnConfig& config, TimeRange times) {
  if (members.empty()) throw EmptyEnsemble("summarize: no members");
  EnsembleForecast fc;
  fc.mean = Matrix::Zero(members.front().rows(), members.front().cols());
  for (const auto& m : members) {
    if (m.rows() != fc.mean.rows() || m.cols() != fc.mean.cols()) {
      throw DimensionMismatch("summarize: ragged members");
    }
    fc.mean += m;
  }
  fc.mean /= static_cast<double>(members.size());
  const double tail = 0.5 * (1.0 - config.interval_level);
  fc.lower = member_quantile(members, tail);
  fc.upper = member_quantile(members, 1.0 - tail);
  fc.members = std::move(members);
  fc.config = config;
  fc.times = times;
  return fc;
}

EnsembleForecast run_ensemble(const QesnConfig& config, const Matrix& responses, const Matrix& inputs,
                              TimeRange train, TimeRange forecast, int threads) {
  config.validate();
  std::vector<Matrix> members(static_cast<std::size_t>(config.K));
  parallel_for(members.size(), threads, [&](std::size_t k) {
    const int member_index = static_cast<int>(k) + 1;
    const FittedMember member = fit_member(config, responses, inputs, train, member_index);
    members[k] = forecast_member(member, inputs, forecast);
  });
  return summarize(std::move(members), config, forecast);
}

}  // namespace qesn
