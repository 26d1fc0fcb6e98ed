#pragma once

#include "qesn/common.hpp"
#include "qesn/eof.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace qesn::csv {

/// Matrix table: header "time,<column ids>", then one row per time with the
/// time label first and values in %.17e.
struct Table {
  std::vector<std::string> column_ids;
  std::vector<std::string> time_labels;
  Matrix values;
};

std::string format_double(double v);

/// Column ids default to v0, v1, ...; time labels to the row index plus `time_offset`.
Table make_table(const Matrix& values, Index time_offset = 0, std::vector<std::string> column_ids = {});

void write_table(const std::filesystem::path& path, const Table& table);
Table read_table(const std::filesystem::path& path, std::string_view first_header = "time");

/// Gridded file: the matrix layout with two extra header lines,
///   time,<cell ids>
///   lat,<lat per column>
///   lon,<lon per column>
///   YYYY-MM,<values>
/// Empty or NaN cells mark land; reading drops any column with a missing value.
void write_grid(const std::filesystem::path& path, const GriddedField& field, std::vector<std::string> cell_ids = {});
GriddedField read_grid(const std::filesystem::path& path, std::vector<std::string>* kept_cell_ids = nullptr);

/// Member trajectories in long form: "member,time,<ids>".
void write_members(const std::filesystem::path& path, const std::vector<Matrix>& members, Index time_offset,
                   const std::vector<std::string>& column_ids = {});
std::vector<Matrix> read_members(const std::filesystem::path& path);

std::string format_year_month(const YearMonth& ym);
YearMonth parse_year_month(const std::string& text);

}  // namespace qesn::csv
