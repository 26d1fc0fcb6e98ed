#include "qesn/tuning.hpp"
#include "qesn/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <set>
#include <tuple>

using namespace qesn;

namespace {

Matrix toy_series(Index n) {
  Rng rng(5, StreamTag::Synthetic, 0);
  Matrix y(n, 2);
  for (Index t = 0; t < n; ++t) {
    y(t, 0) = std::sin(0.25 * t) + 0.05 * rng.normal();
    y(t, 1) = std::cos(0.1 * t) + 0.05 * rng.normal();
  }
  return y;
}

QesnConfig base_config() {
  QesnConfig c;
  c.reservoir.seed = 2;
  c.embedding.lead = 2;
  c.K = 3;
  return c;
}

}  // namespace

TEST_CASE("lorenz grid has 1800 distinct points") {
  const auto g = TuningGrid::lorenz_default();
  CHECK(g.size() == 1800);
  const auto configs = expand_grid(g, QesnConfig{});
  REQUIRE(configs.size() == 1800);
  std::set<std::tuple<int, long, long, int>> seen;
  for (const auto& c : configs) {
    seen.insert({c.reservoir.n_h, std::lround(c.reservoir.nu * 1000), std::lround(c.r_v * 1e6), c.embedding.m});
  }
  CHECK(seen.size() == 1800);
  CHECK(configs.front().reservoir.n_h == 30);
  CHECK(configs.back().reservoir.n_h == 105);
  CHECK(configs.back().reservoir.nu == doctest::Approx(1.0));
  CHECK(configs[1].embedding.m == 4);
}

TEST_CASE("single-point grid returns that point") {
  const Matrix y = toy_series(120);
  TuningGrid g;
  g.n_h_values = {15};
  g.nu_values = {0.4};
  g.r_v_values = {0.01};
  g.m_values = {1};
  const auto res = grid_search(g, y, y, {0, 80}, {80, 100}, base_config(), std::nullopt, 1);
  REQUIRE(res.table.size() == 1);
  CHECK(res.best_index == 0);
  CHECK(res.best_config.reservoir.n_h == 15);
  CHECK(res.best_config.embedding.m == 1);

  auto cfg = base_config();
  cfg.reservoir.n_h = 15;
  cfg.reservoir.nu = 0.4;
  cfg.r_v = 0.01;
  cfg.embedding.m = 1;
  const auto fc = run_ensemble(cfg, y, {0, 80}, {80, 100}, 1);
  CHECK(res.best_score == mse(fc.mean, y.middleRows(80, 20)));
}

TEST_CASE("search is exhaustive, reproducible and records failures") {
  const Matrix y = toy_series(120);
  TuningGrid g;
  g.n_h_values = {20, 30};
  g.nu_values = {0.3, 1.0};
  g.r_v_values = {0.001, 0.01};
  g.m_values = {0, 2};
  const auto a = grid_search(g, y, y, {0, 80}, {80, 100}, base_config(), std::nullopt, 1);
  const auto b = grid_search(g, y, y, {0, 80}, {80, 100}, base_config(), std::nullopt, 3);
  REQUIRE(a.table.size() == 16);
  int failed = 0;
  for (std::size_t i = 0; i < a.table.size(); ++i) {
    const auto& e = a.table[i];
    if (e.config.reservoir.nu == 1.0) {
      CHECK_FALSE(e.ok());
      CHECK(std::isnan(e.score));
      ++failed;
    } else {
      CHECK_MESSAGE(e.ok(), e.error);
      CHECK(e.score >= a.best_score);
      CHECK(e.score == b.table[i].score);
    }
  }
  CHECK(failed == 8);
  CHECK(a.best_index == b.best_index);
}

TEST_CASE("tie-breaking") {
  TuningEntry x, y;
  x.score = y.score = 1.0;
  x.config.reservoir.n_h = 30;
  y.config.reservoir.n_h = 45;
  CHECK(better_candidate(x, 5, y, 1));
  y.config.reservoir.n_h = 30;
  x.config.embedding.m = 2;
  y.config.embedding.m = 4;
  CHECK(better_candidate(x, 5, y, 1));
  y.config.embedding.m = 2;
  x.config.r_v = 0.01;
  y.config.r_v = 0.001;
  CHECK(better_candidate(x, 5, y, 1));
  y.config.r_v = 0.01;
  CHECK(better_candidate(x, 1, y, 5));
  CHECK_FALSE(better_candidate(x, 5, y, 1));
  y.score = 0.5;
  CHECK(better_candidate(y, 9, x, 1));
  y.error = "failed";
  CHECK(better_candidate(x, 9, y, 1));
}

TEST_CASE("grid validation") {
  TuningGrid g;
  g.n_h_values = {10};
  g.nu_values = {};
  g.r_v_values = {0.01};
  g.m_values = {1};
  CHECK_THROWS_AS(g.validate(), InvalidArgument);
  g.nu_values = {1.5};
  CHECK_THROWS_AS(g.validate(), InvalidArgument);
  g.nu_values = {0.5};
  g.objective = Objective::RegionalMse;
  const Matrix y = toy_series(60);
  CHECK_THROWS_AS(grid_search(g, y, y, {0, 40}, {40, 50}, base_config()), InvalidArgument);
  CHECK(parse_objective("regional_mse") == Objective::RegionalMse);
  CHECK_THROWS_AS(parse_objective("mae"), InvalidArgument);
}

TEST_CASE("degenerate reservoir draws are recorded, not fatal") {
  const Matrix y = toy_series(120);
  TuningGrid g;
  g.n_h_values = {2, 30};
  g.nu_values = {0.5};
  g.r_v_values = {0.01};
  g.m_values = {1};
  auto base = base_config();
  const auto res = grid_search(g, y, y, {0, 80}, {80, 100}, base, std::nullopt, 1);
  REQUIRE(res.table.size() == 2);
  CHECK_FALSE(res.table[0].ok());
  CHECK(res.table[0].error.find("spectral radius") != std::string::npos);
  CHECK(res.table[1].ok());
  CHECK(res.best_index == 1);
}
