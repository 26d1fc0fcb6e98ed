#pragma once

#include "qesn/common.hpp"
#include "qesn/reservoir.hpp"

namespace qesn {

/// Output map Y_t = intercept + V1 h_t + V2 (h_t o h_t). V2 is all zeros when
/// the model was fit without the quadratic block.
struct ReadoutWeights {
  Matrix V1;  // n_y x n_h
  Matrix V2;  // n_y x n_h
  Vector intercept;
  Vector R_diag;  // per-output residual variance
  double r_v = 0.0;
  bool quadratic = true;

  Index n_y() const { return V1.rows(); }
  Index n_h() const { return V1.cols(); }
};

/// Generic ridge solution: Y ~ 1 c' + F B.
struct RidgeSolution {
  Matrix coefficients;  // p x n_y
  Vector intercept;     // n_y, zero when fit without intercept
  Vector residual_variance;
};

/// Row t is [h_t, h_t^2] (element-wise square) or just h_t.
Matrix quadratic_features(const Matrix& states, bool include_quadratic);
inline Matrix quadratic_features(const HiddenStateSequence& seq, bool include_quadratic) {
  return quadratic_features(seq.states, include_quadratic);
}

/// Minimizes |Y - 1c' - F B|^2 + r_v |B|^2 over rows at or after skip_rows.
/// The intercept is unpenalized and obtained by centering. Throws
/// SingularSystem if the penalized normal matrix cannot be factored.
RidgeSolution fit_ridge(const Matrix& features, const Matrix& responses, double r_v, Index skip_rows = 0,
                        bool fit_intercept = true);

/// Ridge fit on quadratic features of `states`, split into V1/V2 blocks.
ReadoutWeights fit_readout(const Matrix& states, const Matrix& responses, double r_v, Index skip_rows,
                           bool include_quadratic);

/// Row t = intercept + V1 h_t (+ V2 h_t^2 when include_quadratic).
Matrix predict(const ReadoutWeights& readout, const Matrix& states, bool include_quadratic);
inline Matrix predict(const ReadoutWeights& readout, const HiddenStateSequence& seq, bool include_quadratic) {
  return predict(readout, seq.states, include_quadratic);
}

}  // namespace qesn
