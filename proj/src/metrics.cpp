#include "qesn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace qesn {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17e", v);
  return buf;
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch(std::string(what) + ": shapes " + detail::shape(a) + " and " + detail::shape(b));
  }
}

}  // namespace

std::string ScoreReport::to_text() const {
  std::string out;
  out += "overall_mse=" + fmt_double(overall_mse) + "\n";
  out += "regional_mse=" + (regional_mse ? fmt_double(*regional_mse) : std::string("NA")) + "\n";
  out += "crps=" + fmt_double(crps) + "\n";
  out += "coverage_95=" + fmt_double(coverage_95) + "\n";
  return out;
}

double mse(const Matrix& pred, const Matrix& truth) {
  require_same_shape(pred, truth, "mse");
  if (pred.size() == 0) throw InvalidArgument("mse: empty input");
  return (pred - truth).squaredNorm() / static_cast<double>(pred.size());
}

double crps_ensemble(std::span<const double> members, double observation, bool fair) {
  const std::size_t k = members.size();
  if (k == 0) throw EmptyEnsemble("crps_ensemble: no members");
  double abs_err = 0.0;
  for (double x : members) abs_err += std::abs(x - observation);
  abs_err /= static_cast<double>(k);
  if (k == 1) return abs_err;

  // sum_{k,j} |x_k - x_j| = 2 sum_i (2i - K + 1) x_(i) over the sorted values.
  std::vector<double> sorted(members.begin(), members.end());
  std::sort(sorted.begin(), sorted.end());
  double pair_sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    pair_sum += (2.0 * static_cast<double>(i) - static_cast<double>(k) + 1.0) * sorted[i];
  }
  pair_sum *= 2.0;
  const double kd = static_cast<double>(k);
  const double denom = fair ? 2.0 * kd * (kd - 1.0) : 2.0 * kd * kd;
  return abs_err - pair_sum / denom;
}

double crps_average(std::span<const Matrix> members, const Matrix& truth, bool fair) {
  if (members.empty()) throw EmptyEnsemble("crps_average: no members");
  for (const auto& m : members) require_same_shape(m, truth, "crps_average");
  if (truth.size() == 0) throw InvalidArgument("crps_average: empty input");
  std::vector<double> values(members.size());
  double total = 0.0;
  for (Index j = 0; j < truth.cols(); ++j) {
    for (Index i = 0; i < truth.rows(); ++i) {
      for (std::size_t k = 0; k < members.size(); ++k) values[k] = members[k](i, j);
      total += crps_ensemble(values, truth(i, j), fair);
    }
  }
  return total / static_cast<double>(truth.size());
}

double interval_coverage(const Matrix& lower, const Matrix& upper, const Matrix& truth) {
  require_same_shape(lower, truth, "interval_coverage");
  require_same_shape(upper, truth, "interval_coverage");
  if (truth.size() == 0) throw InvalidArgument("interval_coverage: empty input");
  if ((lower.array() > upper.array()).any()) throw InvalidArgument("interval_coverage: lower exceeds upper");
  const auto inside = (lower.array() <= truth.array() && truth.array() <= upper.array()).count();
  return static_cast<double>(inside) / static_cast<double>(truth.size());
}

}  // namespace qesn
