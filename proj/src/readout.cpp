#include "qesn/readout.hpp"

#include <Eigen/Cholesky>

#include <string>

namespace qesn {

Matrix quadratic_features(const Matrix& states, bool include_quadratic) {
  if (states.rows() == 0) throw InvalidArgument("quadratic_features: no states");
  if (!include_quadratic) return states;
  Matrix out(states.rows(), 2 * states.cols());
  out.leftCols(states.cols()) = states;
  out.rightCols(states.cols()) = states.array().square().matrix();
  return out;
}

RidgeSolution fit_ridge(const Matrix& features, const Matrix& responses, double r_v, Index skip_rows,
                        bool fit_intercept) {
  if (features.rows() != responses.rows()) {
    throw DimensionMismatch("fit_ridge: features " + detail::shape(features) + " vs responses " +
                            detail::shape(responses));
  }
  detail::require(r_v >= 0.0, "fit_ridge: r_v must be non-negative");
  detail::require(skip_rows >= 0, "fit_ridge: skip_rows must be non-negative");
  const Index n = features.rows() - skip_rows;
  if (n <= 0) throw InvalidArgument("fit_ridge: no rows left after skipping " + std::to_string(skip_rows));
  if (!features.allFinite() || !responses.allFinite()) throw NonFinite("fit_ridge: non-finite input");

  const auto f = features.bottomRows(n);
  const auto y = responses.bottomRows(n);
  const Index p = features.cols();

  Vector f_mean = Vector::Zero(p);
  Vector y_mean = Vector::Zero(responses.cols());
  if (fit_intercept) {
    f_mean = f.colwise().mean().transpose();
    y_mean = y.colwise().mean().transpose();
  }
  const Matrix fc = f.rowwise() - f_mean.transpose();
  const Matrix yc = y.rowwise() - y_mean.transpose();

  Matrix gram = Matrix::Zero(p, p);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(fc.transpose());
  gram.diagonal().array() += r_v;
  const Eigen::LLT<Matrix> llt(gram.selfadjointView<Eigen::Lower>());
  if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-14)) {
    throw SingularSystem("fit_ridge: penalized normal equations are singular (r_v = " + std::to_string(r_v) +
                         ")");
  }

  RidgeSolution sol;
  sol.coefficients = llt.solve(fc.transpose() * yc);
  sol.intercept = y_mean - sol.coefficients.transpose() * f_mean;
  const Matrix resid = yc - fc * sol.coefficients;
  sol.residual_variance = resid.colwise().squaredNorm().transpose() / static_cast<double>(n);
  return sol;
}

ReadoutWeights fit_readout(const Matrix& states, const Matrix& responses, double r_v, Index skip_rows,
                           bool include_quadratic) {
  const Index n_h = states.cols();
  RidgeSolution sol = fit_ridge(quadratic_features(states, include_quadratic), responses, r_v, skip_rows);
  ReadoutWeights out;
  out.V1 = sol.coefficients.topRows(n_h).transpose();
  out.V2 = include_quadratic ? Matrix(sol.coefficients.bottomRows(n_h).transpose())
                             : Matrix::Zero(responses.cols(), n_h);
  out.intercept = std::move(sol.intercept);
  out.R_diag = std::move(sol.residual_variance);
  out.r_v = r_v;
  out.quadratic = include_quadratic;
  return out;
}

Matrix predict(const ReadoutWeights& readout, const Matrix& states, bool include_quadratic) {
  if (states.cols() != readout.n_h()) {
    throw DimensionMismatch("predict: states have " + std::to_string(states.cols()) + " columns, readout expects " +
                            std::to_string(readout.n_h()));
  }
  Matrix out = states * readout.V1.transpose();
  if (include_quadratic) out.noalias() += states.array().square().matrix() * readout.V2.transpose();
  out.rowwise() += readout.intercept.transpose();
  return out;
}

}  // namespace qesn
