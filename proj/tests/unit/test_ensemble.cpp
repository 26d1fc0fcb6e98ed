#include "qesn/ensemble.hpp"
#include "qesn/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace qesn;

namespace {

Matrix toy_series(Index n, std::uint64_t seed) {
  Rng rng(seed, StreamTag::Synthetic, 3);
  Matrix y(n, 3);
  for (Index t = 0; t < n; ++t) {
    const double s = static_cast<double>(t);
    y(t, 0) = std::sin(0.2 * s) + 0.1 * rng.normal();
    y(t, 1) = std::cos(0.13 * s) * std::sin(0.05 * s) + 0.1 * rng.normal();
    y(t, 2) = y(t, 0) * y(t, 1) + 0.1 * rng.normal();
  }
  return y;
}

QesnConfig small_config() {
  QesnConfig c;
  c.reservoir.n_h = 20;
  c.reservoir.seed = 17;
  c.embedding.lead = 2;
  c.embedding.m = 2;
  c.K = 8;
  return c;
}

}  // namespace

TEST_CASE("fit_member is deterministic and members differ") {
  const Matrix y = toy_series(150, 1);
  const auto cfg = small_config();
  const auto a = fit_member(cfg, y, {0, 120}, 1);
  const auto b = fit_member(cfg, y, {0, 120}, 1);
  CHECK(a.weights.W == b.weights.W);
  CHECK(a.readout.V1 == b.readout.V1);
  CHECK(a.readout.V2 == b.readout.V2);
  CHECK(a.final_state == b.final_state);
  const auto c = fit_member(cfg, y, {0, 120}, 2);
  CHECK(a.weights.W != c.weights.W);
  CHECK(a.weights.U != c.weights.U);
  CHECK(a.fit_range.begin == cfg.embedding.history());
  CHECK(a.fit_range.end == 120);
}

TEST_CASE("quadratic off leaves V2 empty") {
  const Matrix y = toy_series(150, 2);
  auto cfg = small_config();
  cfg.include_quadratic = false;
  const auto m = fit_member(cfg, y, {0, 120}, 1);
  CHECK(m.readout.V2.cwiseAbs().maxCoeff() == 0.0);
  CHECK_FALSE(m.readout.quadratic);
}

TEST_CASE("forecasting inside the training span reproduces the fit") {
  const Matrix y = toy_series(150, 3);
  auto cfg = small_config();
  cfg.add_residual_noise = false;
  const auto m = fit_member(cfg, y, {0, 120}, 1);
  const TimeRange span = m.fit_range;
  const Matrix x = build_embedded_inputs(y, m.embedding, m.stats, span);
  const auto seq = run_reservoir(m.weights, x, Vector::Zero(cfg.reservoir.n_h));
  const Matrix fitted = predict(m.readout, seq.states, true);
  const Matrix got = forecast_member(m, y, span);
  CHECK((got - fitted).cwiseAbs().maxCoeff() == 0.0);
  const Matrix tail = forecast_member(m, y, {100, 125});
  CHECK((tail.topRows(20) - fitted.bottomRows(20)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("continuing from the final state equals one long run") {
  const Matrix y = toy_series(160, 4);
  auto cfg = small_config();
  cfg.add_residual_noise = false;
  const auto m = fit_member(cfg, y, {0, 120}, 3);
  const Matrix replay = forecast_member(m, y, {m.fit_range.begin, 140});
  const Matrix cont = forecast_member(m, y, {120, 140});
  CHECK((replay.bottomRows(20) - cont).cwiseAbs().maxCoeff() < 1e-12);
  const Matrix gap = forecast_member(m, y, {130, 140});
  CHECK((gap - cont.bottomRows(10)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("forecast inputs never use values after t - lead") {
  const Matrix y = toy_series(160, 5);
  auto cfg = small_config();
  cfg.add_residual_noise = false;
  const auto m = fit_member(cfg, y, {0, 120}, 1);
  const Matrix base = forecast_member(m, y, {120, 122});
  Matrix y2 = y;
  y2.bottomRows(160 - 120).setConstant(1e6);  // rows >= 120 = t - lead for t >= 122
  const Matrix perturbed = forecast_member(m, y2, {120, 122});
  CHECK(base == perturbed);
}

TEST_CASE("K = 1 without noise collapses the interval") {
  const Matrix y = toy_series(150, 6);
  auto cfg = small_config();
  cfg.K = 1;
  cfg.add_residual_noise = false;
  const auto fc = run_ensemble(cfg, y, {0, 120}, {120, 130}, 1);
  CHECK(fc.lower == fc.mean);
  CHECK(fc.upper == fc.mean);
}

TEST_CASE("identical members give identical trajectories") {
  const Matrix y = toy_series(150, 7);
  auto cfg = small_config();
  cfg.add_residual_noise = false;
  const auto a = fit_member(cfg, y, {0, 120}, 5);
  const auto b = fit_member(cfg, y, {0, 120}, 5);
  CHECK(forecast_member(a, y, {120, 130}) == forecast_member(b, y, {120, 130}));
}

TEST_CASE("residual noise follows R_diag") {
  const Matrix y = toy_series(700, 8);
  auto cfg = small_config();
  const auto m = fit_member(cfg, y, {0, 200}, 1);
  auto quiet = m;
  quiet.add_residual_noise = false;
  const TimeRange win{200, 700};
  const Matrix diff = forecast_member(m, y, win) - forecast_member(quiet, y, win);
  for (Index j = 0; j < 3; ++j) {
    const double var = diff.col(j).squaredNorm() / 500.0;
    CHECK(var == doctest::Approx(m.readout.R_diag(j)).epsilon(0.2));
  }
}

TEST_CASE("quantiles are type 7") {
  std::vector<Matrix> members;
  for (double v : {4.0, 1.0, 3.0, 2.0, 5.0}) members.push_back(Matrix::Constant(1, 1, v));
  CHECK(member_quantile(members, 0.0)(0, 0) == 1.0);
  CHECK(member_quantile(members, 1.0)(0, 0) == 5.0);
  CHECK(member_quantile(members, 0.5)(0, 0) == 3.0);
  CHECK(member_quantile(members, 0.1)(0, 0) == doctest::Approx(1.4));
  CHECK(member_quantile(members, 0.975)(0, 0) == doctest::Approx(4.9));
  CHECK_THROWS_AS(member_quantile(std::vector<Matrix>{}, 0.5), EmptyEnsemble);
}

TEST_CASE("summaries are invariant to member order and intervals nest") {
  const Matrix y = toy_series(150, 9);
  auto cfg = small_config();
  cfg.K = 25;
  const auto fc = run_ensemble(cfg, y, {0, 120}, {120, 140}, 1);
  auto shuffled = fc.members;
  std::reverse(shuffled.begin(), shuffled.end());
  std::rotate(shuffled.begin(), shuffled.begin() + 7, shuffled.end());
  const auto again = summarize(shuffled, cfg, fc.times);
  CHECK(again.lower == fc.lower);
  CHECK(again.upper == fc.upper);
  CHECK((again.mean - fc.mean).cwiseAbs().maxCoeff() < 1e-12);

  auto narrow = cfg;
  narrow.interval_level = 0.8;
  const auto fc80 = summarize(fc.members, narrow, fc.times);
  CHECK((fc.lower.array() <= fc80.lower.array()).all());
  CHECK((fc80.upper.array() <= fc.upper.array()).all());
  CHECK((fc.lower.array() <= fc.upper.array()).all());
}

TEST_CASE("ensemble output does not depend on the thread count") {
  const Matrix y = toy_series(150, 10);
  auto cfg = small_config();
  cfg.K = 12;
  const auto a = run_ensemble(cfg, y, {0, 120}, {120, 140}, 1);
  const auto b = run_ensemble(cfg, y, {0, 120}, {120, 140}, 4);
  const auto c = run_ensemble(cfg, y, {0, 120}, {120, 140}, 1);
  for (int k = 0; k < 12; ++k) {
    CHECK(a.members[k] == b.members[k]);
    CHECK(a.members[k] == c.members[k]);
  }
  CHECK(a.mean == b.mean);
  CHECK(a.lower == b.lower);
  CHECK(a.upper == b.upper);
}

TEST_CASE("M3 is a plain leaky ESN with linear readout") {
  const Matrix y = toy_series(150, 11);
  auto cfg = small_config();
  cfg.include_embedding = false;
  cfg.include_quadratic = false;
  cfg.add_residual_noise = false;
  cfg.K = 1;
  const auto fc = run_ensemble(cfg, y, {0, 120}, {120, 130}, 1);

  EmbeddingSpec e = cfg.embedding;
  e.m = 0;
  const TimeRange fit{e.lead, 120};
  const auto stats = fit_normalization(y.topRows(120));
  const Matrix x = build_embedded_inputs(y, e, stats, {fit.begin, 130});
  CHECK(x.cols() == 4);
  const auto w = generate_weights(cfg.reservoir, 4, 1);
  const auto seq = run_reservoir(w, x, Vector::Zero(20));
  const auto sol = fit_ridge(seq.states.topRows(fit.size()), y.middleRows(fit.begin, fit.size()), cfg.r_v);
  Matrix expect = seq.states.bottomRows(10) * sol.coefficients;
  expect.rowwise() += sol.intercept.transpose();
  CHECK((fc.mean - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("member failures abort the run") {
  const Matrix y = toy_series(40, 12);
  auto cfg = small_config();
  cfg.washout = 50;
  CHECK_THROWS_AS(run_ensemble(cfg, y, {0, 30}, {30, 35}, 2), InsufficientHistory);
  cfg = small_config();
  cfg.K = 0;
  CHECK_THROWS_AS(run_ensemble(cfg, y, {0, 30}, {30, 35}, 1), InvalidArgument);
  cfg = small_config();
  CHECK_THROWS_AS(fit_member(cfg, y, Matrix::Zero(39, 3), {0, 30}, 1), DimensionMismatch);
}
