#include "qesn/reservoir.hpp"

#include "qesn/rng.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace qesn {

Activation parse_activation(std::string_view name) {
  if (name == "tanh") return Activation::Tanh;
  if (name == "identity") return Activation::Identity;
  throw InvalidArgument("unknown activation '" + std::string(name) + "' (expected tanh or identity)");
}

std::string to_string(Activation a) {
  return a == Activation::Tanh ? "tanh" : "identity";
}

void ReservoirSpec::validate() const {
  using detail::require;
  require(n_h >= 1, "reservoir.n_h must be >= 1");
  require(nu > 0.0 && nu < 1.0, "reservoir.nu must lie in (0, 1)");
  require(alpha > 0.0 && alpha <= 1.0, "reservoir.alpha must lie in (0, 1]");
  require(pi_w > 0.0 && pi_w <= 1.0, "reservoir.pi_w must lie in (0, 1]");
  require(pi_u > 0.0 && pi_u <= 1.0, "reservoir.pi_u must lie in (0, 1]");
  require(a_w > 0.0, "reservoir.a_w must be > 0");
  require(a_u > 0.0, "reservoir.a_u must be > 0");
}

double spectral_radius(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw DimensionMismatch("spectral_radius: matrix is " + detail::shape(m) + ", not square");
  }
  if (!m.allFinite()) throw NonFinite("spectral_radius: matrix has NaN or Inf entries");
  if (m.size() == 0) return 0.0;
  if (m.isZero(0.0)) return 0.0;
  Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw NonFinite("spectral_radius: eigenvalue iteration did not converge");
  }
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

namespace {

Matrix sparse_uniform(Rng& rng, Index rows, Index cols, double pi, double half_width) {
  Matrix out = Matrix::Zero(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      // Both draws happen for every entry so the stream position is fixed.
      const bool keep = rng.bernoulli(pi);
      const double value = rng.uniform(-half_width, half_width);
      if (keep) out(i, j) = value;
    }
  }
  return out;
}

}  // namespace

ReservoirWeights weights_from_raw(const ReservoirSpec& spec, Matrix raw_w, Matrix u, int member_index) {
  spec.validate();
  if (raw_w.rows() != spec.n_h || raw_w.cols() != spec.n_h) {
    throw DimensionMismatch("weights_from_raw: W is " + detail::shape(raw_w) + ", expected n_h x n_h");
  }
  if (u.rows() != spec.n_h) {
    throw DimensionMismatch("weights_from_raw: U has " + std::to_string(u.rows()) + " rows, expected n_h");
  }
  const double lambda = spectral_radius(raw_w);
  if (lambda < 1e-12) {
    throw DegenerateReservoir("raw W for member " + std::to_string(member_index) +
                              " has spectral radius " + std::to_string(lambda) +
                              "; use a different member index or a larger pi_w");
  }
  ReservoirWeights out;
  out.W = (spec.nu / lambda) * raw_w;
  out.U = std::move(u);
  out.lambda_w = lambda;
  out.spec = spec;
  out.member_index = member_index;
  return out;
}

ReservoirWeights generate_weights(const ReservoirSpec& spec, Index n_input, int member_index) {
  spec.validate();
  detail::require(n_input >= 1, "generate_weights: n_input must be >= 1");
  Rng rng(spec.seed, StreamTag::ReservoirWeights, static_cast<std::uint64_t>(member_index));
  Matrix w = sparse_uniform(rng, spec.n_h, spec.n_h, spec.pi_w, spec.a_w);
  Matrix u = sparse_uniform(rng, spec.n_h, n_input, spec.pi_u, spec.a_u);
  return weights_from_raw(spec, std::move(w), std::move(u), member_index);
}

Vector reservoir_step(const ReservoirWeights& weights, const Vector& h_prev,
                      const Eigen::Ref<const Vector>& x) {
  Vector pre = weights.W * h_prev + weights.U * x;
  if (weights.spec.activation == Activation::Tanh) pre = pre.array().tanh();
  const double alpha = weights.spec.alpha;
  if (alpha == 1.0) return pre;
  return (1.0 - alpha) * h_prev + alpha * pre;
}

HiddenStateSequence run_reservoir(const ReservoirWeights& weights, const Matrix& inputs,
                                  const Vector& initial, Index washout) {
  if (inputs.cols() != weights.n_input()) {
    throw DimensionMismatch("run_reservoir: inputs have " + std::to_string(inputs.cols()) +
                            " columns, U expects " + std::to_string(weights.n_input()));
  }
  if (initial.size() != weights.n_h()) {
    throw DimensionMismatch("run_reservoir: initial state has length " + std::to_string(initial.size()) +
                            ", expected " + std::to_string(weights.n_h()));
  }
  detail::require(washout >= 0, "run_reservoir: washout must be non-negative");

  HiddenStateSequence seq;
  seq.initial = initial;
  seq.washout = washout;
  seq.states.resize(inputs.rows(), weights.n_h());
  Vector h = initial;
  for (Index t = 0; t < inputs.rows(); ++t) {
    h = reservoir_step(weights, h, inputs.row(t).transpose());
    seq.states.row(t) = h.transpose();
  }
  return seq;
}

}  // namespace qesn
