#include "qesn/pipeline.hpp"

#include "qesn/csv.hpp"

#include <fstream>

namespace qesn {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> numbered(const char* prefix, Index n) {
  std::vector<std::string> ids;
  for (Index j = 1; j <= n; ++j) ids.push_back(prefix + std::to_string(j));
  return ids;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot open " + path.string() + " for writing");
  out << text;
}

csv::Table labelled(const Matrix& values, const std::vector<std::string>& time_labels, TimeRange rows,
                    const std::vector<std::string>& ids) {
  csv::Table t;
  t.values = values;
  t.column_ids = ids;
  t.time_labels.assign(time_labels.begin() + rows.begin, time_labels.begin() + rows.end);
  return t;
}

TimeRange require_window(const std::optional<TimeRange>& w, const char* name, Index n_rows) {
  if (!w) throw InvalidArgument(std::string("config: 'windows.") + name + "' is required");
  if (w->end > n_rows) {
    throw InvalidArgument(std::string("config: 'windows.") + name + "' ends at " + std::to_string(w->end) +
                          " but the data have " + std::to_string(n_rows) + " rows");
  }
  return *w;
}

GriddedField load_field(const RunConfig& config, std::vector<std::string>* cell_ids) {
  GriddedField field = csv::read_grid(config.data->path, cell_ids);
  if (config.eof.anomalies) field = compute_anomalies(field, config.eof.climatology);
  return field;
}

GriddedField slice_rows(const GriddedField& f, TimeRange rows) {
  GriddedField out;
  out.values = f.values.middleRows(rows.begin, rows.size());
  out.lats = f.lats;
  out.lons = f.lons;
  out.time_index.assign(f.time_index.begin() + rows.begin, f.time_index.begin() + rows.end);
  return out;
}

}  // namespace

PreparedData prepare_data(const RunConfig& config, std::optional<TimeRange> basis_window) {
  if (!config.data) throw InvalidArgument("config: a 'data' section is required");
  PreparedData d;
  if (config.data->kind == DataKind::Series) {
    csv::Table t = csv::read_table(config.data->path);
    if (!t.values.allFinite()) throw NonFinite(config.data->path.string() + ": missing or non-finite values");
    d.series = t.values;
    d.time_labels = t.time_labels;
    d.column_ids = t.column_ids;
    d.truth = d.series;
    if (!config.data->truth_path.empty()) {
      csv::Table truth = csv::read_table(config.data->truth_path);
      if (truth.values.rows() != d.series.rows() || truth.values.cols() != d.series.cols()) {
        throw DimensionMismatch("truth table " + config.data->truth_path.string() + " does not match the data");
      }
      d.truth = truth.values;
    }
    return d;
  }

  const GriddedField field = load_field(config, &d.cell_ids);
  const TimeRange rows = basis_window ? *basis_window : TimeRange{0, field.n_times()};
  if (rows.end > field.n_times()) throw InvalidArgument("config: basis window exceeds the gridded data");
  const EofBasis basis =
      eof_decompose(slice_rows(field, rows), config.eof.n_eof, config.eof.latitude_weighting);
  d.series = project(basis, field.values);
  d.truth = d.series;
  d.months = field.time_index;
  for (const auto& ym : field.time_index) d.time_labels.push_back(csv::format_year_month(ym));
  d.column_ids = numbered("eof", basis.n_eof());
  d.field = FieldTarget{basis, field.lats, field.lons, field.values, config.eof.region};
  return d;
}

void write_basis(const fs::path& path, const EofBasis& basis, const std::vector<double>& lats,
                 const std::vector<double>& lons, const std::vector<std::string>& cell_ids) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot open " + path.string() + " for writing");
  out << "cell,lat,lon,mean,weight";
  for (Index k = 1; k <= basis.n_eof(); ++k) out << ",eof" << k;
  out << '\n';
  for (Index j = 0; j < basis.n_locations(); ++j) {
    const auto sj = static_cast<std::size_t>(j);
    out << (cell_ids.empty() ? "c" + std::to_string(j) : cell_ids[sj]) << ',' << csv::format_double(lats[sj]) << ','
        << csv::format_double(lons[sj]) << ',' << csv::format_double(basis.column_means(j)) << ','
        << csv::format_double(basis.weights(j));
    for (Index k = 0; k < basis.n_eof(); ++k) out << ',' << csv::format_double(basis.Psi(j, k));
    out << '\n';
  }
}

EofBasis read_basis(const fs::path& path, std::vector<double>* lats, std::vector<double>* lons) {
  const csv::Table table = csv::read_table(path, "cell");
  if (table.values.cols() < 5 || table.column_ids[0] != "lat" || table.column_ids[3] != "weight") {
    throw InvalidArgument(path.string() + ": not a basis file");
  }
  EofBasis b;
  const Index n = table.values.rows();
  b.column_means = table.values.col(2);
  b.weights = table.values.col(3);
  b.Psi = table.values.rightCols(table.values.cols() - 4);
  if (lats) *lats = std::vector<double>(table.values.col(0).data(), table.values.col(0).data() + n);
  if (lons) *lons = std::vector<double>(table.values.col(1).data(), table.values.col(1).data() + n);
  return b;
}

void cmd_simulate(const RunConfig& config) {
  const Lorenz96Run run = simulate_lorenz96(config.lorenz96);
  const auto ids = numbered("site", run.observed.cols());
  csv::write_table(config.output / "observed.csv", csv::make_table(run.observed, 0, ids));
  csv::write_table(config.output / "latent.csv", csv::make_table(run.latent, 0, ids));
}

void cmd_eof(const RunConfig& config) {
  if (!config.data || config.data->kind != DataKind::Grid) {
    throw InvalidArgument("config: eof needs 'data.kind' = grid");
  }
  std::vector<std::string> cell_ids;
  const GriddedField field = load_field(config, &cell_ids);
  const TimeRange rows = config.windows.train ? require_window(config.windows.train, "train", field.n_times())
                                              : TimeRange{0, field.n_times()};
  const EofBasis basis = eof_decompose(slice_rows(field, rows), config.eof.n_eof, config.eof.latitude_weighting);

  if (config.eof.anomalies) csv::write_grid(config.output / "anomalies.csv", field, cell_ids);
  write_basis(config.output / "basis.csv", basis, field.lats, field.lons, cell_ids);

  const Matrix coefficients = project(basis, field.values);
  std::vector<std::string> labels;
  for (const auto& ym : field.time_index) labels.push_back(csv::format_year_month(ym));
  csv::write_table(config.output / "coefficients.csv",
                   labelled(coefficients, labels, {0, field.n_times()}, numbered("eof", basis.n_eof())));

  std::string ev = "eof,fraction\n";
  for (Index k = 0; k < basis.n_eof(); ++k) {
    ev += std::to_string(k + 1) + "," + csv::format_double(basis.explained_variance(k)) + "\n";
  }
  write_text(config.output / "explained_variance.csv", ev);

  // Round trip on the basis span, and truncation error of the training rows.
  const Matrix recon = reconstruct(basis, coefficients);
  const Matrix centered = recon.rowwise() - basis.column_means.transpose();
  const double roundtrip =
      (reconstruct(basis, project(basis, recon)) - recon).norm() / std::max(centered.norm(), 1e-300);
  const Matrix train_rows = field.values.middleRows(rows.begin, rows.size());
  const Matrix train_centered = train_rows.rowwise() - basis.column_means.transpose();
  const double truncation = (reconstruct(basis, project(basis, train_rows)) - train_rows).norm() /
                            std::max(train_centered.norm(), 1e-300);
  write_text(config.output / "roundtrip.txt", "roundtrip_relative_error=" + csv::format_double(roundtrip) +
                                                  "\ntruncation_relative_error=" + csv::format_double(truncation) +
                                                  "\n");
}

TuningResult cmd_tune(const RunConfig& config, int threads) {
  if (!config.grid) throw InvalidArgument("config: a 'grid' section is required for tune");
  const PreparedData data = prepare_data(config, config.windows.train);
  const TimeRange train = require_window(config.windows.train, "train", data.series.rows());
  const TimeRange validation = require_window(config.windows.validation, "validation", data.series.rows());
  if (validation.begin < train.end) throw InvalidArgument("config: validation window must follow the training window");

  // Validation rows of the responses are only used for scoring, so they can
  // carry the truth table when one is given.
  Matrix responses = data.series;
  responses.middleRows(validation.begin, validation.size()) = data.truth.middleRows(validation.begin, validation.size());
  const TuningResult result =
      grid_search(*config.grid, responses, data.series, train, validation, config.qesn, data.field, threads);

  std::string table = "n_h,nu,r_v,m,alpha,score,status\n";
  for (const auto& e : result.table) {
    table += std::to_string(e.config.reservoir.n_h) + "," + csv::format_double(e.config.reservoir.nu) + "," +
             csv::format_double(e.config.r_v) + "," + std::to_string(e.config.embedding.m) + "," +
             csv::format_double(e.config.reservoir.alpha) + "," + csv::format_double(e.score) + "," +
             (e.ok() ? "ok" : "failed: " + e.error) + "\n";
  }
  write_text(config.output / "tuning.csv", table);

  RunConfig best = config;
  best.qesn = result.best_config;
  best.grid.reset();
  write_text(config.output / "best_config.json", to_json(best).dump(2) + "\n");
  return result;
}

ScoreReport cmd_forecast(const RunConfig& config, int threads) {
  const PreparedData data = prepare_data(config, config.windows.train);
  const TimeRange train = require_window(config.windows.train, "train", data.series.rows());
  const TimeRange window = require_window(config.windows.forecast, "forecast", data.series.rows());

  const EnsembleForecast fc = run_ensemble(config.qesn, data.series, train, window, threads);
  const fs::path out = config.output;

  csv::write_members(out / "members.csv", fc.members, window.begin, data.column_ids);
  csv::write_table(out / "mean.csv", labelled(fc.mean, data.time_labels, window, data.column_ids));
  csv::write_table(out / "lower.csv", labelled(fc.lower, data.time_labels, window, data.column_ids));
  csv::write_table(out / "upper.csv", labelled(fc.upper, data.time_labels, window, data.column_ids));
  const Matrix truth = data.truth.middleRows(window.begin, window.size());
  csv::write_table(out / "truth.csv", labelled(truth, data.time_labels, window, data.column_ids));

  ScoreReport report;
  if (data.field) {
    const FieldTarget& target = *data.field;
    report = score_field(fc, target);
    write_basis(out / "basis.csv", target.basis, target.lats, target.lons, data.cell_ids);

    const FieldForecast field = reconstruct_forecast(fc, target.basis);
    auto grid_of = [&](const Matrix& values) {
      GriddedField g;
      g.values = values;
      g.lats = target.lats;
      g.lons = target.lons;
      g.time_index.assign(data.months.begin() + window.begin, data.months.begin() + window.end);
      return g;
    };
    csv::write_grid(out / "field_mean.csv", grid_of(field.mean), data.cell_ids);
    csv::write_grid(out / "field_lower.csv", grid_of(field.lower), data.cell_ids);
    csv::write_grid(out / "field_upper.csv", grid_of(field.upper), data.cell_ids);
    csv::write_grid(out / "field_truth.csv", grid_of(target.truth.middleRows(window.begin, window.size())),
                    data.cell_ids);

    // Plot-ready regional index: member quantiles of the region average.
    std::vector<Matrix> regional;
    for (const auto& m : field.members) regional.push_back(nino34_series(m, target.lats, target.lons, target.region));
    Matrix table(window.size(), 4);
    table.col(0) = nino34_series(target.truth.middleRows(window.begin, window.size()), target.lats, target.lons,
                                 target.region);
    table.col(1) = nino34_series(field.mean, target.lats, target.lons, target.region);
    const double tail = 0.5 * (1.0 - config.qesn.interval_level);
    table.col(2) = member_quantile(regional, tail);
    table.col(3) = member_quantile(regional, 1.0 - tail);
    csv::write_table(out / "nino34.csv", labelled(table, data.time_labels, window, {"truth", "mean", "lower", "upper"}));
  } else {
    report = score_series(fc, truth);
  }
  write_text(out / "scores.txt", report.to_text());
  return report;
}

}  // namespace qesn
