#include "qesn/lorenz96.hpp"

#include "qesn/rng.hpp"

#include <cmath>
#include <string>

namespace qesn {

void Lorenz96Config::validate() const {
  using detail::require;
  require(n_sites >= 4, "lorenz96.n_sites must be >= 4");
  require(dt > 0.0, "lorenz96.dt must be > 0");
  require(euler_substeps >= 1, "lorenz96.euler_substeps must be >= 1");
  require(sigma_eta >= 0.0, "lorenz96.sigma_eta must be >= 0");
  require(n_periods >= 1, "lorenz96.n_periods must be >= 1");
  require(burn_in >= 0, "lorenz96.burn_in must be >= 0");
  require(perturbation_sd >= 0.0, "lorenz96.perturbation_sd must be >= 0");
  if (initial_state && initial_state->size() != n_sites) {
    throw InvalidArgument("lorenz96.initial_state has " + std::to_string(initial_state->size()) +
                          " entries, expected n_sites = " + std::to_string(n_sites));
  }
}

Vector lorenz96_derivative(const Vector& z, double forcing) {
  const Index n = z.size();
  detail::require(n >= 4, "lorenz96_derivative: need at least 4 sites");
  Vector dz(n);
  for (Index i = 0; i < n; ++i) {
    const double next = z((i + 1) % n);
    const double prev = z((i + n - 1) % n);
    const double prev2 = z((i + n - 2) % n);
    dz(i) = (next - prev2) * prev - z(i) + forcing;
  }
  return dz;
}

Vector lorenz96_euler_step(const Vector& z, double forcing, double dt) {
  return z + dt * lorenz96_derivative(z, forcing);
}

Lorenz96Run simulate_lorenz96(const Lorenz96Config& config) {
  config.validate();
  Vector z;
  if (config.initial_state) {
    z = *config.initial_state;
  } else {
    Rng rng(config.seed, StreamTag::LorenzInitial, 0);
    z = Vector::Constant(config.n_sites, config.forcing);
    for (Index i = 0; i < z.size(); ++i) z(i) += config.perturbation_sd * rng.normal();
  }

  const double h = config.dt / config.euler_substeps;
  auto advance = [&](int period) {
    for (int k = 0; k < config.euler_substeps; ++k) z = lorenz96_euler_step(z, config.forcing, h);
    if (!z.allFinite() || z.cwiseAbs().maxCoeff() > 1e6) {
      throw NumericalBlowup("simulate_lorenz96: state exceeded 1e6 at period " + std::to_string(period) +
                            " (Euler step " + std::to_string(h) + " is too large)");
    }
  };

  for (int s = 0; s < config.burn_in; ++s) advance(s);

  Lorenz96Run run;
  run.latent.resize(config.n_periods, config.n_sites);
  for (int t = 0; t < config.n_periods; ++t) {
    advance(config.burn_in + t);
    run.latent.row(t) = z.transpose();
  }

  run.observed = run.latent;
  if (config.sigma_eta > 0.0) {
    Rng rng(config.seed, StreamTag::LorenzNoise, 0);
    for (Index t = 0; t < run.observed.rows(); ++t) {
      for (Index i = 0; i < run.observed.cols(); ++i) run.observed(t, i) += config.sigma_eta * rng.normal();
    }
  }
  return run;
}

}  // namespace qesn
