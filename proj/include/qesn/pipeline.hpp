#pragma once

#include "qesn/config.hpp"
#include "qesn/evaluation.hpp"

#include <filesystem>
#include <vector>

namespace qesn {

/// Response series prepared for modelling. For gridded data the series is the
/// EOF coefficient matrix and `field` maps it back to the grid.
struct PreparedData {
  Matrix series;
  Matrix truth;
  std::vector<std::string> time_labels;
  std::vector<std::string> column_ids;
  std::optional<FieldTarget> field;
  std::vector<std::string> cell_ids;
  std::vector<YearMonth> months;
};

/// Loads `config.data`; for grids computes anomalies and the EOF basis from
/// the rows of `basis_window` (all rows when empty).
PreparedData prepare_data(const RunConfig& config, std::optional<TimeRange> basis_window);

// Command entry points. Each writes its files under config.output.

void cmd_simulate(const RunConfig& config);
void cmd_eof(const RunConfig& config);
TuningResult cmd_tune(const RunConfig& config, int threads);
ScoreReport cmd_forecast(const RunConfig& config, int threads);

/// Basis file: "cell,lat,lon,mean,weight,eof1..eofK".
void write_basis(const std::filesystem::path& path, const EofBasis& basis, const std::vector<double>& lats,
                 const std::vector<double>& lons, const std::vector<std::string>& cell_ids);
EofBasis read_basis(const std::filesystem::path& path, std::vector<double>* lats = nullptr,
                    std::vector<double>* lons = nullptr);

}  // namespace qesn
