// qesn: simulate Lorenz-96 data, build EOFs, tune and run ensemble QESN forecasts.
//
//   qesn simulate --config run.json
//   qesn eof      --config sst.json
//   qesn tune     --config run.json --threads 4
//   qesn forecast --config run.json --seed 3 --output out/
//
// Exit codes: 0 success, 1 usage/config error, 2 numerical/data error.

#include "qesn/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

namespace {

struct Options {
  std::string config;
  int threads = 0;
  std::optional<std::uint64_t> seed;
  std::string output;
};

void add_common(CLI::App* cmd, Options& opt) {
  cmd->add_option("--config", opt.config, "Path to the JSON run configuration")->required()->check(CLI::ExistingFile);
  cmd->add_option("--threads", opt.threads, "Worker cap (0 = machine parallelism)")->check(CLI::NonNegativeNumber);
  cmd->add_option("--seed", opt.seed, "Override the config seed");
  cmd->add_option("--output", opt.output, "Override the output directory");
}

qesn::RunConfig load(const Options& opt) {
  qesn::RunConfig cfg = qesn::load_run_config(opt.config);
  if (opt.seed) cfg.apply_seed(*opt.seed);
  if (!opt.output.empty()) cfg.output = opt.output;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ensemble quadratic echo state network forecasting"};
  app.require_subcommand(1);

  Options opt;
  auto* simulate = app.add_subcommand("simulate", "Simulate Lorenz-96 data (observed.csv, latent.csv)");
  auto* eof = app.add_subcommand("eof", "Anomalies, EOF basis and coefficient series of a gridded field");
  auto* tune = app.add_subcommand("tune", "Grid-search hyper-parameters on a validation window");
  auto* forecast = app.add_subcommand("forecast", "Fit the ensemble and forecast, writing trajectories and scores");
  for (auto* cmd : {simulate, eof, tune, forecast}) add_common(cmd, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const qesn::RunConfig cfg = load(opt);
    if (simulate->parsed()) {
      qesn::cmd_simulate(cfg);
    } else if (eof->parsed()) {
      qesn::cmd_eof(cfg);
    } else if (tune->parsed()) {
      const auto result = qesn::cmd_tune(cfg, opt.threads);
      std::cout << "best: n_h=" << result.best_config.reservoir.n_h << " nu=" << result.best_config.reservoir.nu
                << " r_v=" << result.best_config.r_v << " m=" << result.best_config.embedding.m
                << " score=" << result.best_score << '\n';
    } else if (forecast->parsed()) {
      std::cout << qesn::cmd_forecast(cfg, opt.threads).to_text();
    }
  } catch (const qesn::InvalidArgument& e) {
    std::cerr << "qesn: " << e.what() << '\n';
    return 1;
  } catch (const qesn::Error& e) {
    std::cerr << "qesn: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "qesn: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
