#pragma once

#include "qesn/common.hpp"

#include <vector>

namespace qesn {

struct YearMonth {
  int year = 0;
  int month = 1;  // 1..12
  friend auto operator<=>(const YearMonth&, const YearMonth&) = default;
};

/// Monthly gridded field: rows are months, columns are (ocean) grid cells.
struct GriddedField {
  Matrix values;               // T x n_loc
  std::vector<double> lats;    // degrees, [-90, 90]
  std::vector<double> lons;    // degrees, [0, 360)
  std::vector<YearMonth> time_index;

  Index n_times() const { return values.rows(); }
  Index n_locations() const { return values.cols(); }
  void validate() const;
};

struct YearRange {
  int first = 1981;
  int last = 2010;
};

/// Empirical orthogonal functions of a field: data ~ means + coefficients Psi'.
struct EofBasis {
  Matrix Psi;            // n_loc x n_eof, orthonormal columns
  Matrix coefficients;   // T x n_eof
  Vector explained_variance;
  Vector column_means;
  Vector weights;        // per-column scaling applied before the SVD (ones unless area-weighted)
  Vector singular_values;

  Index n_eof() const { return Psi.cols(); }
  Index n_locations() const { return Psi.rows(); }
};

/// Removes, per cell, the calendar-month mean over the climatology years.
GriddedField compute_anomalies(const GriddedField& raw, YearRange climatology);

/// Leading n_eof EOFs of the column-centered field via a thin SVD. Each basis
/// column is signed so its largest-magnitude entry is positive. With
/// latitude_weighting, columns are scaled by sqrt(cos(lat)) before the SVD.
EofBasis eof_decompose(const Matrix& values, Index n_eof, const Vector& weights);
EofBasis eof_decompose(const Matrix& values, Index n_eof);
EofBasis eof_decompose(const GriddedField& field, Index n_eof, bool latitude_weighting = false);

/// ((rows - means) o weights) Psi
Matrix project(const EofBasis& basis, const Matrix& field_rows);

/// (coefficients Psi') / weights + means
Matrix reconstruct(const EofBasis& basis, const Matrix& coefficient_rows);

/// Closed lat/lon box, longitudes in the 0-360 convention.
struct LatLonBox {
  double lat_min = -5.0;
  double lat_max = 5.0;
  double lon_min = 240.0;  // 120W
  double lon_max = 290.0;  // 70W

  bool contains(double lat, double lon) const;
};

/// Nino 3.4 averaging region, 5S-5N by 120W-70W.
inline constexpr LatLonBox kNino34Box{};

/// Column indices of cells inside `box`; throws EmptyRegion if none qualify.
std::vector<Index> region_cells(const std::vector<double>& lats, const std::vector<double>& lons,
                                const LatLonBox& box = kNino34Box);

/// Unweighted mean of the cells inside `box`.
double nino34_average(const Eigen::Ref<const Vector>& field_row, const std::vector<double>& lats,
                      const std::vector<double>& lons, const LatLonBox& box = kNino34Box);

/// nino34_average applied to each row.
Vector nino34_series(const Matrix& field_rows, const std::vector<double>& lats, const std::vector<double>& lons,
                     const LatLonBox& box = kNino34Box);

}  // namespace qesn
