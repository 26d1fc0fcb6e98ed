#include "qesn/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

namespace qesn::csv {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_value(const std::string& raw, const std::filesystem::path& path, std::size_t line_no) {
  const std::string s = trim(raw);
  if (s.empty() || s == "NA" || s == "NaN" || s == "nan") return std::numeric_limits<double>::quiet_NaN();
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) {
    throw InvalidArgument(path.string() + ":" + std::to_string(line_no) + ": cannot parse '" + s + "' as a number");
  }
  return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  return in;
}

std::vector<std::string> default_ids(Index n, const char* prefix) {
  std::vector<std::string> ids;
  ids.reserve(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) ids.push_back(prefix + std::to_string(j));
  return ids;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "NaN";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17e", v);
  return buf;
}

std::string format_year_month(const YearMonth& ym) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d", ym.year, ym.month);
  return buf;
}

YearMonth parse_year_month(const std::string& text) {
  const std::string s = trim(text);
  YearMonth ym;
  char dash = 0;
  std::istringstream in(s);
  if (!(in >> ym.year >> dash >> ym.month) || dash != '-' || ym.month < 1 || ym.month > 12) {
    throw InvalidArgument("bad time stamp '" + s + "' (expected YYYY-MM)");
  }
  return ym;
}

Table make_table(const Matrix& values, Index time_offset, std::vector<std::string> column_ids) {
  Table t;
  t.values = values;
  t.column_ids = column_ids.empty() ? default_ids(values.cols(), "v") : std::move(column_ids);
  if (static_cast<Index>(t.column_ids.size()) != values.cols()) {
    throw DimensionMismatch("make_table: column id count does not match the matrix");
  }
  for (Index i = 0; i < values.rows(); ++i) t.time_labels.push_back(std::to_string(time_offset + i));
  return t;
}

void write_table(const std::filesystem::path& path, const Table& table) {
  if (static_cast<Index>(table.column_ids.size()) != table.values.cols() ||
      static_cast<Index>(table.time_labels.size()) != table.values.rows()) {
    throw DimensionMismatch("write_table: labels do not match the matrix");
  }
  auto out = open_out(path);
  out << "time";
  for (const auto& id : table.column_ids) out << ',' << id;
  out << '\n';
  for (Index i = 0; i < table.values.rows(); ++i) {
    out << table.time_labels[static_cast<std::size_t>(i)];
    for (Index j = 0; j < table.values.cols(); ++j) out << ',' << format_double(table.values(i, j));
    out << '\n';
  }
  if (!out) throw Error("write failed for " + path.string());
}

Table read_table(const std::filesystem::path& path, std::string_view first_header) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument(path.string() + ": empty file");
  auto header = split(trim(line));
  if (header.empty() || trim(header[0]) != first_header) {
    throw InvalidArgument(path.string() + ": first header cell must be '" + std::string(first_header) + "'");
  }
  Table t;
  for (std::size_t j = 1; j < header.size(); ++j) t.column_ids.push_back(trim(header[j]));
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split(trim(line));
    if (cells.size() != header.size()) {
      throw InvalidArgument(path.string() + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " cells, got " + std::to_string(cells.size()));
    }
    t.time_labels.push_back(trim(cells[0]));
    std::vector<double> row;
    for (std::size_t j = 1; j < cells.size(); ++j) row.push_back(parse_value(cells[j], path, line_no));
    rows.push_back(std::move(row));
  }
  t.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(t.column_ids.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) t.values(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  }
  return t;
}

void write_grid(const std::filesystem::path& path, const GriddedField& field, std::vector<std::string> cell_ids) {
  field.validate();
  if (cell_ids.empty()) cell_ids = default_ids(field.n_locations(), "c");
  if (static_cast<Index>(cell_ids.size()) != field.n_locations()) {
    throw DimensionMismatch("write_grid: cell id count does not match the field");
  }
  auto out = open_out(path);
  out << "time";
  for (const auto& id : cell_ids) out << ',' << id;
  out << "\nlat";
  for (double v : field.lats) out << ',' << format_double(v);
  out << "\nlon";
  for (double v : field.lons) out << ',' << format_double(v);
  out << '\n';
  for (Index i = 0; i < field.n_times(); ++i) {
    out << format_year_month(field.time_index[static_cast<std::size_t>(i)]);
    for (Index j = 0; j < field.n_locations(); ++j) out << ',' << format_double(field.values(i, j));
    out << '\n';
  }
  if (!out) throw Error("write failed for " + path.string());
}

GriddedField read_grid(const std::filesystem::path& path, std::vector<std::string>* kept_cell_ids) {
  auto in = open_in(path);
  std::string line;
  std::vector<std::vector<std::string>> head;
  for (int k = 0; k < 3; ++k) {
    if (!std::getline(in, line)) throw InvalidArgument(path.string() + ": missing header lines");
    head.push_back(split(trim(line)));
  }
  if (trim(head[0][0]) != "time" || trim(head[1][0]) != "lat" || trim(head[2][0]) != "lon") {
    throw InvalidArgument(path.string() + ": header lines must start with time, lat, lon");
  }
  const std::size_t width = head[0].size();
  if (head[1].size() != width || head[2].size() != width) {
    throw InvalidArgument(path.string() + ": lat/lon header lines do not match the column count");
  }

  std::vector<YearMonth> times;
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 3;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split(trim(line));
    if (cells.size() != width) {
      throw InvalidArgument(path.string() + ":" + std::to_string(line_no) + ": expected " + std::to_string(width) +
                            " cells, got " + std::to_string(cells.size()));
    }
    times.push_back(parse_year_month(cells[0]));
    std::vector<double> row;
    for (std::size_t j = 1; j < width; ++j) row.push_back(parse_value(cells[j], path, line_no));
    rows.push_back(std::move(row));
  }

  // Land mask: keep only columns that are complete.
  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j + 1 < width; ++j) {
    bool complete = true;
    for (const auto& r : rows) complete = complete && std::isfinite(r[j]);
    if (complete) keep.push_back(j);
  }

  GriddedField field;
  field.time_index = std::move(times);
  field.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(keep.size()));
  if (kept_cell_ids) kept_cell_ids->clear();
  for (std::size_t c = 0; c < keep.size(); ++c) {
    const std::size_t j = keep[c];
    field.lats.push_back(parse_value(head[1][j + 1], path, 2));
    field.lons.push_back(parse_value(head[2][j + 1], path, 3));
    if (kept_cell_ids) kept_cell_ids->push_back(trim(head[0][j + 1]));
    for (std::size_t i = 0; i < rows.size(); ++i) field.values(static_cast<Index>(i), static_cast<Index>(c)) = rows[i][j];
  }
  field.validate();
  return field;
}

void write_members(const std::filesystem::path& path, const std::vector<Matrix>& members, Index time_offset,
                   const std::vector<std::string>& column_ids) {
  if (members.empty()) throw EmptyEnsemble("write_members: no members");
  const auto ids = column_ids.empty() ? default_ids(members.front().cols(), "v") : column_ids;
  auto out = open_out(path);
  out << "member,time";
  for (const auto& id : ids) out << ',' << id;
  out << '\n';
  for (std::size_t k = 0; k < members.size(); ++k) {
    const Matrix& m = members[k];
    for (Index i = 0; i < m.rows(); ++i) {
      out << (k + 1) << ',' << (time_offset + i);
      for (Index j = 0; j < m.cols(); ++j) out << ',' << format_double(m(i, j));
      out << '\n';
    }
  }
  if (!out) throw Error("write failed for " + path.string());
}

std::vector<Matrix> read_members(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument(path.string() + ": empty file");
  const auto header = split(trim(line));
  if (header.size() < 2 || trim(header[0]) != "member" || trim(header[1]) != "time") {
    throw InvalidArgument(path.string() + ": header must start with member,time");
  }
  const std::size_t n_cols = header.size() - 2;
  std::vector<std::vector<std::vector<double>>> grouped;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(trim(line));
    if (cells.size() != header.size()) throw InvalidArgument(path.string() + ": ragged row " + std::to_string(line_no));
    const auto k = static_cast<std::size_t>(std::stoul(cells[0]));
    if (k == 0) throw InvalidArgument(path.string() + ": member ids start at 1");
    if (grouped.size() < k) grouped.resize(k);
    std::vector<double> row;
    for (std::size_t j = 2; j < cells.size(); ++j) row.push_back(parse_value(cells[j], path, line_no));
    grouped[k - 1].push_back(std::move(row));
  }
  std::vector<Matrix> out;
  for (const auto& g : grouped) {
    Matrix m(static_cast<Index>(g.size()), static_cast<Index>(n_cols));
    for (std::size_t i = 0; i < g.size(); ++i)
      for (std::size_t j = 0; j < n_cols; ++j) m(static_cast<Index>(i), static_cast<Index>(j)) = g[i][j];
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace qesn::csv
