#pragma once

#include "qesn/common.hpp"

#include <cstdint>
#include <string>
#include <string_view>

namespace qesn {

enum class Activation { Tanh, Identity };

Activation parse_activation(std::string_view name);
std::string to_string(Activation a);

/// Hyper-parameters of one reservoir. The defaults are the sparse/small-weight
/// values used for both the Lorenz-96 and SST experiments.
struct ReservoirSpec {
  int n_h = 60;
  double nu = 0.55;  // target spectral radius of W
  double pi_w = 0.1;
  double pi_u = 0.1;
  double a_w = 0.1;
  double a_u = 0.1;
  double alpha = 1.0;  // leaking rate
  Activation activation = Activation::Tanh;
  std::uint64_t seed = 0;

  /// Throws InvalidArgument naming the offending field.
  void validate() const;
};

/// Fixed random weights of one ensemble member. W is stored already rescaled
/// to spectral radius nu; lambda_w keeps the radius of the raw draw.
struct ReservoirWeights {
  Matrix W;
  Matrix U;
  double lambda_w = 0.0;
  ReservoirSpec spec;
  int member_index = 0;

  Index n_h() const { return W.rows(); }
  Index n_input() const { return U.cols(); }
};

struct HiddenStateSequence {
  Matrix states;  // T x n_h, row t is h_t
  Vector initial;
  Index washout = 0;
};

/// Largest eigenvalue magnitude of a square matrix.
double spectral_radius(const Matrix& m);

/// Draws W and U from the sparse uniform mixture and rescales W to radius nu.
/// The random stream depends only on (spec.seed, member_index).
ReservoirWeights generate_weights(const ReservoirSpec& spec, Index n_input, int member_index);

/// Builds weights from a given raw W and U (W is rescaled to spec.nu).
ReservoirWeights weights_from_raw(const ReservoirSpec& spec, Matrix raw_w, Matrix u, int member_index);

/// One leaky update: h = (1 - alpha) h_prev + alpha g(W h_prev + U x).
Vector reservoir_step(const ReservoirWeights& weights, const Vector& h_prev,
                      const Eigen::Ref<const Vector>& x);

/// Runs the recursion over every row of `inputs`, starting from `initial`.
/// Washout is recorded only; no rows are dropped.
HiddenStateSequence run_reservoir(const ReservoirWeights& weights, const Matrix& inputs,
                                  const Vector& initial, Index washout = 0);

}  // namespace qesn
