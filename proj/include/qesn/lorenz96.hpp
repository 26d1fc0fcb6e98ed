#pragma once

#include "qesn/common.hpp"

#include <cstdint>
#include <optional>

namespace qesn {

/// Lorenz-96 data-generating process: fixed-step Euler integration of the
/// periodic 40-site system plus i.i.d. Gaussian observation noise. Recorded
/// periods are dt apart; each period takes euler_substeps steps of dt/euler_substeps.
/// A single step of 0.1 per period diverges at F = 5.
struct Lorenz96Config {
  int n_sites = 40;
  double forcing = 5.0;
  double dt = 0.10;
  int euler_substeps = 10;
  double sigma_eta = 0.5;
  int n_periods = 750;
  int burn_in = 500;
  std::uint64_t seed = 0;
  /// Explicit start state; when empty the equilibrium z_i = F is perturbed
  /// with N(0, perturbation_sd^2) per site.
  std::optional<Vector> initial_state;
  double perturbation_sd = 0.1;

  void validate() const;
};

struct Lorenz96Run {
  Matrix latent;    // n_periods x n_sites
  Matrix observed;  // latent + noise
};

/// dz_i/dt = (z_{i+1} - z_{i-2}) z_{i-1} - z_i + F with circular indexing.
Vector lorenz96_derivative(const Vector& z, double forcing);

/// One explicit Euler step.
Vector lorenz96_euler_step(const Vector& z, double forcing, double dt);

Lorenz96Run simulate_lorenz96(const Lorenz96Config& config);

}  // namespace qesn
