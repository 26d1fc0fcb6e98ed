#include "qesn/eof.hpp"

#include <Eigen/SVD>

#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace qesn {

void GriddedField::validate() const {
  const auto n = static_cast<std::size_t>(values.cols());
  if (lats.size() != n || lons.size() != n) {
    throw DimensionMismatch("gridded field: " + std::to_string(n) + " columns but " + std::to_string(lats.size()) +
                            " lats / " + std::to_string(lons.size()) + " lons");
  }
  if (time_index.size() != static_cast<std::size_t>(values.rows())) {
    throw DimensionMismatch("gridded field: " + std::to_string(values.rows()) + " rows but " +
                            std::to_string(time_index.size()) + " time stamps");
  }
  for (double lat : lats) detail::require(lat >= -90.0 && lat <= 90.0, "gridded field: latitude out of range");
  for (const auto& ym : time_index) detail::require(ym.month >= 1 && ym.month <= 12, "gridded field: bad month");
  if (!values.allFinite()) throw NonFinite("gridded field: missing or non-finite values after masking");
}

GriddedField compute_anomalies(const GriddedField& raw, YearRange climatology) {
  raw.validate();
  detail::require(climatology.first <= climatology.last, "compute_anomalies: empty climatology interval");

  const Index n_loc = raw.n_locations();
  std::array<Vector, 12> sums;
  std::array<int, 12> counts{};
  for (auto& s : sums) s = Vector::Zero(n_loc);
  for (Index t = 0; t < raw.n_times(); ++t) {
    const YearMonth ym = raw.time_index[static_cast<std::size_t>(t)];
    if (ym.year < climatology.first || ym.year > climatology.last) continue;
    sums[ym.month - 1] += raw.values.row(t).transpose();
    ++counts[ym.month - 1];
  }
  for (int mo = 0; mo < 12; ++mo) {
    if (counts[mo] == 0) {
      throw MissingClimatologyMonth("compute_anomalies: month " + std::to_string(mo + 1) + " has no data in " +
                                    std::to_string(climatology.first) + "-" + std::to_string(climatology.last));
    }
    sums[mo] /= static_cast<double>(counts[mo]);
  }

  GriddedField out = raw;
  for (Index t = 0; t < raw.n_times(); ++t) {
    out.values.row(t) -= sums[raw.time_index[static_cast<std::size_t>(t)].month - 1].transpose();
  }
  return out;
}

EofBasis eof_decompose(const Matrix& values, Index n_eof, const Vector& weights) {
  const Index t = values.rows();
  const Index n_loc = values.cols();
  detail::require(n_eof >= 1, "eof_decompose: n_eof must be >= 1");
  if (n_eof > std::min(t, n_loc)) {
    throw InvalidArgument("eof_decompose: n_eof = " + std::to_string(n_eof) + " exceeds min(T, n_loc) = " +
                          std::to_string(std::min(t, n_loc)));
  }
  if (weights.size() != n_loc) throw DimensionMismatch("eof_decompose: weight vector length mismatch");
  if (!values.allFinite()) throw NonFinite("eof_decompose: non-finite values");

  EofBasis basis;
  basis.column_means = values.colwise().mean().transpose();
  basis.weights = weights;
  const Matrix centered =
      ((values.rowwise() - basis.column_means.transpose()).array().rowwise() * weights.transpose().array()).matrix();
  const double total = centered.squaredNorm();
  if (!(total > 0.0)) throw RankDeficient("eof_decompose: field has zero variance after centering");

  Eigen::BDCSVD<Matrix> svd(centered, Eigen::ComputeThinU | Eigen::ComputeThinV);
  basis.singular_values = svd.singularValues().head(n_eof);
  basis.Psi = svd.matrixV().leftCols(n_eof);
  for (Index k = 0; k < n_eof; ++k) {
    Index arg = 0;
    basis.Psi.col(k).cwiseAbs().maxCoeff(&arg);
    if (basis.Psi(arg, k) < 0.0) basis.Psi.col(k) *= -1.0;
  }
  basis.coefficients = centered * basis.Psi;
  basis.explained_variance = basis.singular_values.array().square() / total;
  return basis;
}

EofBasis eof_decompose(const Matrix& values, Index n_eof) {
  return eof_decompose(values, n_eof, Vector::Ones(values.cols()));
}

EofBasis eof_decompose(const GriddedField& field, Index n_eof, bool latitude_weighting) {
  field.validate();
  Vector w = Vector::Ones(field.n_locations());
  if (latitude_weighting) {
    for (Index j = 0; j < w.size(); ++j) {
      w(j) = std::sqrt(std::max(0.0, std::cos(field.lats[static_cast<std::size_t>(j)] * std::numbers::pi / 180.0)));
    }
    detail::require((w.array() > 0.0).all(), "eof_decompose: latitude weighting zeroes a polar column");
  }
  return eof_decompose(field.values, n_eof, w);
}

Matrix project(const EofBasis& basis, const Matrix& field_rows) {
  if (field_rows.cols() != basis.n_locations()) {
    throw DimensionMismatch("project: rows have " + std::to_string(field_rows.cols()) + " columns, basis has " +
                            std::to_string(basis.n_locations()) + " locations");
  }
  const Matrix centered = ((field_rows.rowwise() - basis.column_means.transpose()).array().rowwise() *
                           basis.weights.transpose().array())
                              .matrix();
  return centered * basis.Psi;
}

Matrix reconstruct(const EofBasis& basis, const Matrix& coefficient_rows) {
  if (coefficient_rows.cols() != basis.n_eof()) {
    throw DimensionMismatch("reconstruct: rows have " + std::to_string(coefficient_rows.cols()) +
                            " coefficients, basis has " + std::to_string(basis.n_eof()));
  }
  Matrix out = coefficient_rows * basis.Psi.transpose();
  out = (out.array().rowwise() / basis.weights.transpose().array()).matrix();
  out.rowwise() += basis.column_means.transpose();
  return out;
}

namespace {

double wrap_longitude(double lon) {
  double x = std::fmod(lon, 360.0);
  if (x < 0.0) x += 360.0;
  return x;
}

}  // namespace

bool LatLonBox::contains(double lat, double lon) const {
  const double x = wrap_longitude(lon);
  return lat >= lat_min && lat <= lat_max && x >= lon_min && x <= lon_max;
}

std::vector<Index> region_cells(const std::vector<double>& lats, const std::vector<double>& lons,
                                const LatLonBox& box) {
  if (lats.size() != lons.size()) throw DimensionMismatch("region_cells: lats/lons length mismatch");
  std::vector<Index> cells;
  for (std::size_t j = 0; j < lats.size(); ++j) {
    if (box.contains(lats[j], lons[j])) cells.push_back(static_cast<Index>(j));
  }
  if (cells.empty()) throw EmptyRegion("no grid cells inside the averaging region");
  return cells;
}

double nino34_average(const Eigen::Ref<const Vector>& field_row, const std::vector<double>& lats,
                      const std::vector<double>& lons, const LatLonBox& box) {
  if (static_cast<std::size_t>(field_row.size()) != lats.size()) {
    throw DimensionMismatch("nino34_average: row length does not match the grid");
  }
  const auto cells = region_cells(lats, lons, box);
  double sum = 0.0;
  for (Index j : cells) sum += field_row(j);
  return sum / static_cast<double>(cells.size());
}

Vector nino34_series(const Matrix& field_rows, const std::vector<double>& lats, const std::vector<double>& lons,
                     const LatLonBox& box) {
  if (static_cast<std::size_t>(field_rows.cols()) != lats.size()) {
    throw DimensionMismatch("nino34_series: column count does not match the grid");
  }
  const auto cells = region_cells(lats, lons, box);
  Vector out = Vector::Zero(field_rows.rows());
  for (Index j : cells) out += field_rows.col(j);
  return out / static_cast<double>(cells.size());
}

}  // namespace qesn
