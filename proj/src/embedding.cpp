#include "qesn/embedding.hpp"

#include <cmath>
#include <string>

namespace qesn {

void EmbeddingSpec::validate() const {
  using detail::require;
  require(lead >= 1, "embedding.lead must be >= 1");
  require(tau >= 1, "embedding.tau must be >= 1");
  require(m >= 0, "embedding.m must be >= 0");
}

Matrix NormalizationStats::apply(const Matrix& rows) const {
  if (rows.cols() != means.size()) {
    throw DimensionMismatch("normalization: rows have " + std::to_string(rows.cols()) +
                            " columns, stats cover " + std::to_string(means.size()));
  }
  return (rows.rowwise() - means.transpose()).array().rowwise() / sds.transpose().array();
}

Vector NormalizationStats::apply(const Vector& row) const {
  if (row.size() != means.size()) throw DimensionMismatch("normalization: row length mismatch");
  return (row - means).array() / sds.array();
}

NormalizationStats fit_normalization(const Matrix& training_rows) {
  const Index n = training_rows.rows();
  if (n < 2) throw InvalidArgument("fit_normalization: need at least 2 rows, got " + std::to_string(n));
  NormalizationStats stats;
  stats.means = training_rows.colwise().mean().transpose();
  stats.sds.resize(training_rows.cols());
  for (Index j = 0; j < training_rows.cols(); ++j) {
    const double ss = (training_rows.col(j).array() - stats.means(j)).square().sum();
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(sd > 0.0)) throw ConstantColumn("fit_normalization: column " + std::to_string(j) + " is constant");
    stats.sds(j) = sd;
  }
  return stats;
}

Matrix build_embedded_inputs(const Matrix& series, const EmbeddingSpec& spec,
                             const std::optional<NormalizationStats>& stats, TimeRange t_range) {
  spec.validate();
  const Index n_x = series.cols();
  if (spec.normalize) {
    if (!stats) throw InvalidArgument("build_embedded_inputs: normalization requested without statistics");
    if (stats->means.size() != n_x) throw DimensionMismatch("build_embedded_inputs: statistics width mismatch");
  }
  if (t_range.empty()) return Matrix(0, spec.width(n_x));
  if (t_range.begin - spec.history() < 0) {
    throw InsufficientHistory("build_embedded_inputs: time " + std::to_string(t_range.begin) + " needs lag " +
                              std::to_string(spec.history()) + " before the series start");
  }
  if (t_range.end - spec.lead > series.rows()) {
    throw InsufficientHistory("build_embedded_inputs: time " + std::to_string(t_range.end - 1) +
                              " needs series row " + std::to_string(t_range.end - 1 - spec.lead) +
                              " but the series has " + std::to_string(series.rows()) + " rows");
  }

  const Index offset = spec.include_intercept ? 1 : 0;
  Matrix out(t_range.size(), spec.width(n_x));
  for (Index r = 0; r < t_range.size(); ++r) {
    const Index t = t_range.begin + r;
    if (spec.include_intercept) out(r, 0) = 1.0;
    for (int j = 0; j <= spec.m; ++j) {
      const Index src = t - spec.lead - static_cast<Index>(j) * spec.tau;
      auto block = out.block(r, offset + j * n_x, 1, n_x);
      if (spec.normalize) {
        block = ((series.row(src) - stats->means.transpose()).array() / stats->sds.transpose().array()).matrix();
      } else {
        block = series.row(src);
      }
    }
  }
  return out;
}

}  // namespace qesn
