// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "synthetic_sst.hpp"

#include "qesn/config.hpp"
#include "qesn/csv.hpp"
#include "qesn/ensemble.hpp"
#include "qesn/eof.hpp"
#include "qesn/lorenz96.hpp"
#include "qesn/metrics.hpp"
#include "qesn/pipeline.hpp"
#include "qesn/readout.hpp"
#include "qesn/reservoir.hpp"
#include "qesn/rng.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <algorithm>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace qesn;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failed = 0;

void report(int id, const char* title, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++g_failed;
  std::printf("[%s] criterion %2d: %s -- %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Matrix random_matrix(Index r, Index c, Rng& rng) {
  Matrix m(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) m(i, j) = rng.normal();
  return m;
}

// Lorenz-96 desk-scale experiment: 750 periods, train on 651, forecast the last 99 at lead 6.
struct LorenzSetup {
  Lorenz96Run run;
  QesnConfig config;
  TimeRange train{0, 651};
  TimeRange holdout{651, 750};
};

LorenzSetup lorenz_setup(std::uint64_t seed) {
  LorenzSetup s;
  Lorenz96Config l;
  l.seed = seed;
  s.run = simulate_lorenz96(l);
  s.config.reservoir.n_h = 60;
  s.config.reservoir.nu = 0.55;
  s.config.reservoir.seed = seed;
  s.config.r_v = 0.001;
  s.config.embedding.m = 4;
  s.config.embedding.tau = 1;
  s.config.embedding.lead = 6;
  s.config.K = 500;
  return s;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------

Outcome coverage_reproduction() {
  const std::vector<std::uint64_t> seeds{1, 2, 3};
  double cov_obs = 0.0, cov_latent = 0.0, cov_obs_quiet = 0.0, cov_latent_quiet = 0.0;
  for (auto seed : seeds) {
    auto s = lorenz_setup(seed);
    const auto fc = run_ensemble(s.config, s.run.observed, s.train, s.holdout);
    cov_obs += interval_coverage(fc.lower, fc.upper, s.run.observed.middleRows(651, 99));
    cov_latent += interval_coverage(fc.lower, fc.upper, s.run.latent.middleRows(651, 99));
    s.config.add_residual_noise = false;
    const auto quiet = run_ensemble(s.config, s.run.observed, s.train, s.holdout);
    cov_obs_quiet += interval_coverage(quiet.lower, quiet.upper, s.run.observed.middleRows(651, 99));
    cov_latent_quiet += interval_coverage(quiet.lower, quiet.upper, s.run.latent.middleRows(651, 99));
  }
  const double n = static_cast<double>(seeds.size());
  cov_obs /= n;
  cov_latent /= n;
  cov_obs_quiet /= n;
  cov_latent_quiet /= n;
  std::string d = fmt("coverage vs held-out data %.4f", cov_obs) + fmt(" (vs latent %.4f);", cov_latent) +
                  fmt(" weight spread only: %.4f", cov_obs_quiet) + fmt(" (vs latent %.4f)", cov_latent_quiet);
  return {cov_obs >= 0.90 && cov_obs <= 0.99, d};
}

Outcome ablation_ordering() {
  double full = 0.0, m3 = 0.0;
  const int n_seeds = 5;
  for (int seed = 11; seed < 11 + n_seeds; ++seed) {
    auto s = lorenz_setup(static_cast<std::uint64_t>(seed));
    const Matrix truth = s.run.observed.middleRows(651, 99);
    full += mse(run_ensemble(s.config, s.run.observed, s.train, s.holdout).mean, truth);
    s.config.include_embedding = false;
    s.config.include_quadratic = false;
    m3 += mse(run_ensemble(s.config, s.run.observed, s.train, s.holdout).mean, truth);
  }
  full /= n_seeds;
  m3 /= n_seeds;
  return {full <= m3, fmt("mean holdout MSE full %.4f", full) + fmt(" vs M3 %.4f", m3)};
}

Outcome ridge_oracle() {
  Rng rng(77, StreamTag::Synthetic, 0);
  double worst = 0.0;
  int count = 0;
  const double penalties[] = {0.0, 0.001, 0.01};
  for (int k = 0; k < 20; ++k) {
    const Index p = 1 + (k * 7) % 50;
    const Index n = p + 5 + (k * 13) % 60;
    const Index q = 1 + k % 3;
    const double r_v = penalties[k % 3];
    const Matrix f = random_matrix(n, p, rng);
    const Matrix y = random_matrix(n, q, rng);
    const auto got = fit_ridge(f, y, r_v);

    // normal equations of [1 F] with the intercept unpenalized
    Matrix a(n, p + 1);
    a.col(0).setOnes();
    a.rightCols(p) = f;
    Matrix lhs = a.transpose() * a;
    lhs.diagonal().tail(p).array() += r_v;
    const Matrix sol = lhs.fullPivLu().solve(a.transpose() * y);
    const Matrix coef = sol.bottomRows(p);
    worst = std::max(worst, (got.coefficients - coef).norm() / coef.norm());
    worst = std::max(worst, (got.intercept - sol.row(0).transpose()).norm() / std::max(sol.row(0).norm(), 1e-300));
    ++count;
  }
  return {count == 20 && worst < 1e-8, fmt("20 problems, worst relative error %.2e", worst)};
}

Outcome spectral_radius_invariant() {
  const int sizes[] = {30, 60, 120};
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    ReservoirSpec spec;
    spec.n_h = sizes[i % 3];
    spec.nu = 0.05 + 0.009 * i;
    spec.seed = 1000 + static_cast<std::uint64_t>(i);
    const auto w = generate_weights(spec, 10, 1 + i % 7);
    // independent complex Schur based eigenvalues
    const Eigen::ComplexEigenSolver<Matrix> ces(w.W, false);
    const double oracle = ces.eigenvalues().cwiseAbs().maxCoeff();
    worst = std::max(worst, std::abs(oracle - spec.nu) / spec.nu);
    worst = std::max(worst, std::abs(spectral_radius(w.W) - spec.nu) / spec.nu);
  }
  return {worst < 1e-6, fmt("100 reservoirs, worst relative deviation %.2e", worst)};
}

Outcome fading_memory() {
  ReservoirSpec spec;
  spec.nu = 0.55;
  spec.alpha = 1.0;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    spec.seed = seed;
    const auto w = generate_weights(spec, 5, 1);
    Rng rng(seed, StreamTag::Synthetic, 9);
    const Matrix x = random_matrix(200, 5, rng);
    Vector h0a(60), h0b(60);
    for (Index i = 0; i < 60; ++i) {
      h0a(i) = rng.uniform(-1.0, 1.0);
      h0b(i) = rng.uniform(-1.0, 1.0);
    }
    const auto a = run_reservoir(w, x, h0a);
    const auto b = run_reservoir(w, x, h0b);
    worst = std::max(worst, (a.states.row(199) - b.states.row(199)).norm());
  }
  return {worst < 1e-6, fmt("10 reservoirs, worst final gap %.2e", worst)};
}

Outcome lorenz_derivative() {
  const Vector eq = lorenz96_derivative(Vector::Constant(40, 5.0), 5.0);
  Vector e1 = Vector::Zero(40);
  e1(0) = 1.0;
  const Vector d = lorenz96_derivative(e1, 5.0);
  const bool ok = eq.cwiseAbs().maxCoeff() == 0.0 && d(0) == 4.0;
  return {ok, fmt("max |f(F)| = %g", eq.cwiseAbs().maxCoeff()) + fmt(", f(e_1)[1] = %g", d(0))};
}

Outcome crps_estimator() {
  Rng rng(5, StreamTag::Synthetic, 0);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 1 + trial % 5;
    std::vector<double> x(static_cast<std::size_t>(k));
    for (auto& v : x) v = rng.normal(0.0, 1.5);
    const double y = rng.normal();
    double a = 0.0, b = 0.0;
    for (double xi : x) a += std::abs(xi - y);
    for (double xi : x)
      for (double xj : x) b += std::abs(xi - xj);
    const double brute = a / k - b / (2.0 * k * k);
    worst = std::max(worst, std::abs(crps_ensemble(x, y) - brute));
  }
  const std::vector<double> one{2.5};
  const bool k1 = crps_ensemble(one, -1.0) == 3.5;
  return {worst < 1e-12 && k1, fmt("50 ensembles, worst deviation %.2e", worst) + (k1 ? ", K=1 ok" : ", K=1 wrong")};
}

Outcome eof_round_trip() {
  Rng rng(8, StreamTag::Synthetic, 0);
  const Matrix x = random_matrix(30, 50, rng);
  const auto b = eof_decompose(x, 30);
  const double rt = (reconstruct(b, b.coefficients) - x).norm() / x.norm();
  const double orth = (b.Psi.transpose() * b.Psi - Matrix::Identity(30, 30)).cwiseAbs().maxCoeff();
  Vector a(30), p(50);
  for (Index i = 0; i < 30; ++i) a(i) = rng.normal();
  for (Index i = 0; i < 50; ++i) p(i) = rng.normal();
  const auto r1 = eof_decompose(Matrix(a * p.transpose()), 3);
  const double ev = std::abs(r1.explained_variance(0) - 1.0);
  std::string d = fmt("round trip %.2e", rt) + fmt(", |Psi'Psi - I| %.2e", orth) + fmt(", |ev1 - 1| %.2e", ev);
  return {rt < 1e-8 && orth < 1e-10 && ev < 1e-10, d};
}

Outcome determinism(const fs::path& work) {
  Lorenz96Config l;
  l.seed = 21;
  const auto run = simulate_lorenz96(l);
  fs::create_directories(work);
  csv::write_table(work / "observed.csv", csv::make_table(run.observed));

  const std::string config_text = R"({"seed": 21,
    "data": {"kind": "series", "path": "observed.csv"},
    "windows": {"train": [0, 651], "forecast": [651, 750]},
    "ensemble": {"K": 100}})";
  std::ofstream(work / "det.json") << config_text;

  const int thread_counts[] = {1, 2, 4, 1};
  std::vector<fs::path> outs;
  for (std::size_t i = 0; i < 4; ++i) {
    const fs::path out = work / ("det_out_" + std::to_string(i));
    fs::remove_all(out);
#ifdef QESN_CLI_PATH
    const std::string cmd = std::string(QESN_CLI_PATH) + " forecast --config " + (work / "det.json").string() +
                            " --threads " + std::to_string(thread_counts[i]) + " --output " + out.string() +
                            " > /dev/null";
    if (std::system(cmd.c_str()) != 0) return {false, "qesn forecast failed"};
#else
    RunConfig cfg = load_run_config(work / "det.json");
    cfg.output = out;
    cmd_forecast(cfg, thread_counts[i]);
#endif
    outs.push_back(out);
  }
  int files = 0;
  for (const auto& entry : fs::directory_iterator(outs[0])) {
    const auto name = entry.path().filename();
    for (std::size_t i = 1; i < outs.size(); ++i) {
      if (slurp(outs[0] / name) != slurp(outs[i] / name)) return {false, name.string() + " differs"};
    }
    ++files;
  }
  return {files >= 6, std::to_string(files) + " output files byte-identical across --threads 1, 2, 4 and a rerun"};
}

void write_masked_grid(const fs::path& path, const testing::SyntheticSst& sst) {
  const GriddedField& f = sst.raw;
  std::ofstream out(path, std::ios::binary);
  out << "time";
  for (Index j = 0; j < f.n_locations(); ++j) out << ",c" << j;
  out << "\nlat";
  for (double v : f.lats) out << ',' << csv::format_double(v);
  out << "\nlon";
  for (double v : f.lons) out << ',' << csv::format_double(v);
  out << '\n';
  for (Index t = 0; t < f.n_times(); ++t) {
    out << csv::format_year_month(f.time_index[static_cast<std::size_t>(t)]);
    for (Index j = 0; j < f.n_locations(); ++j) {
      out << ',';
      if (!sst.land[static_cast<std::size_t>(j)]) out << csv::format_double(f.values(t, j));
    }
    out << '\n';
  }
}

Outcome synthetic_sst(const fs::path& work) {
  const auto sst = testing::make_synthetic_sst(2016);

  // 1) climatology removal: a pure cycle vanishes, and the planted anomalies
  //    come back minus their own 1981-2010 monthly means.
  GriddedField cycle = sst.raw;
  cycle.values = sst.seasonal;
  const double cycle_left = compute_anomalies(cycle, {1981, 2010}).values.cwiseAbs().maxCoeff();
  const GriddedField anom = compute_anomalies(sst.raw, {1981, 2010});
  GriddedField planted = sst.raw;
  planted.values = sst.anomalies;
  const double anom_err = (anom.values - compute_anomalies(planted, {1981, 2010}).values).cwiseAbs().maxCoeff();

  // 2) end-to-end forecast through the gridded pipeline.
  fs::create_directories(work);
  write_masked_grid(work / "sst_grid.csv", sst);
  // rows: 1970-01 = 0; train through 2010-12 (row 492), forecast 2011-01 .. 2016-12
  const std::string config_text = R"({"seed": 7,
    "data": {"kind": "grid", "path": "sst_grid.csv"},
    "windows": {"train": [0, 492], "forecast": [492, 564]},
    "reservoir": {"n_h": 120, "nu": 0.35},
    "embedding": {"lead": 6, "tau": 6, "m": 4},
    "ensemble": {"K": 200, "r_v": 0.01},
    "eof": {"n_eof": 10, "climatology": [1981, 2010]}})";
  std::ofstream(work / "sst.json") << config_text;
  RunConfig cfg = load_run_config(work / "sst.json");
  cfg.output = work / "sst_out";
  const ScoreReport rep = cmd_forecast(cfg, 0);

  const csv::Table nino = csv::read_table(cfg.output / "nino34.csv");
  const Vector truth = nino.values.col(0);
  const Vector mean = nino.values.col(1);
  const double qesn_mse = (mean - truth).squaredNorm() / static_cast<double>(truth.size());
  const double clim_mse = truth.squaredNorm() / static_cast<double>(truth.size());
  const GriddedField mean_field = csv::read_grid(cfg.output / "field_mean.csv");

  const bool regional_consistent = rep.regional_mse && std::abs(*rep.regional_mse - qesn_mse) < 1e-9;
  const bool ok = cycle_left < 1e-12 && anom_err < 1e-10 && qesn_mse < clim_mse && regional_consistent &&
                  mean_field.n_locations() == static_cast<Index>(std::count(sst.land.begin(), sst.land.end(), false));
  std::string d = fmt("cycle residual %.1e", cycle_left) + fmt(", anomaly error %.1e", anom_err) +
                  fmt("; Nino3.4 MSE QESN %.4f", qesn_mse) + fmt(" vs climatology %.4f", clim_mse) +
                  fmt(" (%.0f ocean cells)", static_cast<double>(mean_field.n_locations()));
  return {ok, d};
}

}  // namespace

int main() {
  const fs::path work = fs::temp_directory_path() / "qesn_acceptance";
  fs::create_directories(work);

  report(1, "Lorenz-96 95% interval coverage in [0.90, 0.99], 3 seeds", coverage_reproduction);
  report(2, "full QESN holdout MSE <= M3, 5 seeds", ablation_ordering);
  report(3, "ridge matches normal equations to 1e-8", ridge_oracle);
  report(4, "spectral radius within 1e-6 of nu", spectral_radius_invariant);
  report(5, "fading memory gap < 1e-6 after 200 steps", fading_memory);
  report(6, "Lorenz-96 equilibrium and e_1 derivative", lorenz_derivative);
  report(7, "CRPS matches brute force to 1e-12", crps_estimator);
  report(8, "EOF round trip, orthonormality, rank-1 variance", eof_round_trip);
  report(9, "byte-identical forecasts across thread counts", [&] { return determinism(work / "determinism"); });
  report(10, "synthetic SST anomalies and Nino 3.4 skill", [&] { return synthetic_sst(work / "sst"); });

  std::printf("%d of 10 criteria failed\n", g_failed);
  return g_failed == 0 ? 0 : 1;
}
