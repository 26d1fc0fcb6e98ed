#pragma once

#include "qesn/ensemble.hpp"
#include "qesn/eof.hpp"
#include "qesn/lorenz96.hpp"
#include "qesn/tuning.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace qesn {

enum class DataKind { Series, Grid };

struct DataSection {
  DataKind kind = DataKind::Series;
  std::filesystem::path path;        // series table or gridded file
  std::filesystem::path truth_path;  // optional; scoring target instead of `path`
};

struct EofSection {
  int n_eof = 10;
  bool anomalies = true;
  YearRange climatology{1981, 2010};
  bool latitude_weighting = false;
  LatLonBox region = kNino34Box;
};

struct Windows {
  std::optional<TimeRange> train;
  std::optional<TimeRange> validation;
  std::optional<TimeRange> forecast;
};

/// One experiment, read from a JSON file. Relative data paths resolve against
/// the config file's directory. Unknown keys are rejected.
struct RunConfig {
  std::uint64_t seed = 0;
  std::filesystem::path output = "qesn_out";
  std::optional<DataSection> data;
  Lorenz96Config lorenz96;
  Windows windows;
  QesnConfig qesn;
  EofSection eof;
  std::optional<TuningGrid> grid;

  /// Pushes the top-level seed into every seeded component.
  void apply_seed(std::uint64_t s);
};

/// Parse failures are InvalidArgument naming the offending key.
RunConfig parse_run_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

nlohmann::json to_json(const RunConfig& config);

}  // namespace qesn
