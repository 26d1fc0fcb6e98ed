// Python bindings for the qesn library.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "qesn/config.hpp"
#include "qesn/ensemble.hpp"
#include "qesn/eof.hpp"
#include "qesn/evaluation.hpp"
#include "qesn/lorenz96.hpp"
#include "qesn/metrics.hpp"
#include "qesn/pipeline.hpp"
#include "qesn/readout.hpp"
#include "qesn/reservoir.hpp"
#include "qesn/tuning.hpp"

#include <string>
#include <vector>

namespace py = pybind11;
using namespace qesn;

namespace {

TimeRange to_range(const py::object& obj) {
  if (py::isinstance<TimeRange>(obj)) return obj.cast<TimeRange>();
  const auto pair = obj.cast<std::pair<Index, Index>>();
  return {pair.first, pair.second};
}

std::optional<NormalizationStats> to_stats(const py::object& obj) {
  if (obj.is_none()) return std::nullopt;
  return obj.cast<NormalizationStats>();
}

}  // namespace

PYBIND11_MODULE(_qesn, m) {
  m.doc() = "Ensemble quadratic echo state networks for spatio-temporal forecasting";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", error.ptr());
  py::register_exception<DimensionMismatch>(m, "DimensionMismatch", error.ptr());
  py::register_exception<NonFinite>(m, "NonFinite", error.ptr());
  py::register_exception<DegenerateReservoir>(m, "DegenerateReservoir", error.ptr());
  py::register_exception<InsufficientHistory>(m, "InsufficientHistory", error.ptr());
  py::register_exception<ConstantColumn>(m, "ConstantColumn", error.ptr());
  py::register_exception<SingularSystem>(m, "SingularSystem", error.ptr());
  py::register_exception<NumericalBlowup>(m, "NumericalBlowup", error.ptr());
  py::register_exception<MissingClimatologyMonth>(m, "MissingClimatologyMonth", error.ptr());
  py::register_exception<RankDeficient>(m, "RankDeficient", error.ptr());
  py::register_exception<EmptyRegion>(m, "EmptyRegion", error.ptr());
  py::register_exception<EmptyEnsemble>(m, "EmptyEnsemble", error.ptr());

  py::class_<TimeRange>(m, "TimeRange")
      .def(py::init([](Index b, Index e) { return TimeRange{b, e}; }), py::arg("begin"), py::arg("end"))
      .def_readwrite("begin", &TimeRange::begin)
      .def_readwrite("end", &TimeRange::end)
      .def("__len__", &TimeRange::size)
      .def("__repr__", [](const TimeRange& r) {
        return "TimeRange(" + std::to_string(r.begin) + ", " + std::to_string(r.end) + ")";
      });

  // --- reservoir -----------------------------------------------------------
  py::enum_<Activation>(m, "Activation").value("tanh", Activation::Tanh).value("identity", Activation::Identity);

  py::class_<ReservoirSpec>(m, "ReservoirSpec")
      .def(py::init<>())
      .def_readwrite("n_h", &ReservoirSpec::n_h)
      .def_readwrite("nu", &ReservoirSpec::nu)
      .def_readwrite("pi_w", &ReservoirSpec::pi_w)
      .def_readwrite("pi_u", &ReservoirSpec::pi_u)
      .def_readwrite("a_w", &ReservoirSpec::a_w)
      .def_readwrite("a_u", &ReservoirSpec::a_u)
      .def_readwrite("alpha", &ReservoirSpec::alpha)
      .def_readwrite("activation", &ReservoirSpec::activation)
      .def_readwrite("seed", &ReservoirSpec::seed)
      .def("validate", &ReservoirSpec::validate);

  py::class_<ReservoirWeights>(m, "ReservoirWeights")
      .def_readonly("W", &ReservoirWeights::W)
      .def_readonly("U", &ReservoirWeights::U)
      .def_readonly("lambda_w", &ReservoirWeights::lambda_w)
      .def_readonly("spec", &ReservoirWeights::spec)
      .def_readonly("member_index", &ReservoirWeights::member_index);

  py::class_<HiddenStateSequence>(m, "HiddenStateSequence")
      .def_readonly("states", &HiddenStateSequence::states)
      .def_readonly("initial", &HiddenStateSequence::initial)
      .def_readonly("washout", &HiddenStateSequence::washout);

  m.def("spectral_radius", &spectral_radius, py::arg("matrix"));
  m.def("generate_weights", &generate_weights, py::arg("spec"), py::arg("n_input"), py::arg("member_index"));
  m.def("weights_from_raw", &weights_from_raw, py::arg("spec"), py::arg("raw_w"), py::arg("u"),
        py::arg("member_index") = 0);
  m.def("run_reservoir", &run_reservoir, py::arg("weights"), py::arg("inputs"), py::arg("initial"),
        py::arg("washout") = 0);

  // --- embedding -----------------------------------------------------------
  py::class_<EmbeddingSpec>(m, "EmbeddingSpec")
      .def(py::init<>())
      .def_readwrite("lead", &EmbeddingSpec::lead)
      .def_readwrite("tau", &EmbeddingSpec::tau)
      .def_readwrite("m", &EmbeddingSpec::m)
      .def_readwrite("include_intercept", &EmbeddingSpec::include_intercept)
      .def_readwrite("normalize", &EmbeddingSpec::normalize)
      .def("width", &EmbeddingSpec::width, py::arg("n_x"));

  py::class_<NormalizationStats>(m, "NormalizationStats")
      .def_readonly("means", &NormalizationStats::means)
      .def_readonly("sds", &NormalizationStats::sds)
      .def("apply", py::overload_cast<const Matrix&>(&NormalizationStats::apply, py::const_), py::arg("rows"));

  m.def("fit_normalization", &fit_normalization, py::arg("training_rows"));
  m.def(
      "build_embedded_inputs",
      [](const Matrix& series, const EmbeddingSpec& spec, const py::object& stats, const py::object& t_range) {
        return build_embedded_inputs(series, spec, to_stats(stats), to_range(t_range));
      },
      py::arg("series"), py::arg("spec"), py::arg("stats"), py::arg("t_range"));

  // --- readout -------------------------------------------------------------
  py::class_<ReadoutWeights>(m, "ReadoutWeights")
      .def_readonly("V1", &ReadoutWeights::V1)
      .def_readonly("V2", &ReadoutWeights::V2)
      .def_readonly("intercept", &ReadoutWeights::intercept)
      .def_readonly("R_diag", &ReadoutWeights::R_diag)
      .def_readonly("r_v", &ReadoutWeights::r_v);

  py::class_<RidgeSolution>(m, "RidgeSolution")
      .def_readonly("coefficients", &RidgeSolution::coefficients)
      .def_readonly("intercept", &RidgeSolution::intercept)
      .def_readonly("residual_variance", &RidgeSolution::residual_variance);

  m.def("quadratic_features", py::overload_cast<const Matrix&, bool>(&quadratic_features), py::arg("states"),
        py::arg("include_quadratic") = true);
  m.def("fit_ridge", &fit_ridge, py::arg("features"), py::arg("responses"), py::arg("r_v"), py::arg("skip_rows") = 0,
        py::arg("fit_intercept") = true);
  m.def("fit_readout", &fit_readout, py::arg("states"), py::arg("responses"), py::arg("r_v"),
        py::arg("skip_rows") = 0, py::arg("include_quadratic") = true);
  m.def("predict", py::overload_cast<const ReadoutWeights&, const Matrix&, bool>(&predict), py::arg("readout"),
        py::arg("states"), py::arg("include_quadratic") = true);

  // --- ensemble ------------------------------------------------------------
  py::class_<QesnConfig>(m, "QesnConfig")
      .def(py::init<>())
      .def_readwrite("reservoir", &QesnConfig::reservoir)
      .def_readwrite("embedding", &QesnConfig::embedding)
      .def_readwrite("r_v", &QesnConfig::r_v)
      .def_readwrite("K", &QesnConfig::K)
      .def_readwrite("include_quadratic", &QesnConfig::include_quadratic)
      .def_readwrite("include_embedding", &QesnConfig::include_embedding)
      .def_readwrite("add_residual_noise", &QesnConfig::add_residual_noise)
      .def_readwrite("washout", &QesnConfig::washout)
      .def_readwrite("interval_level", &QesnConfig::interval_level)
      .def("validate", &QesnConfig::validate);

  py::class_<FittedMember>(m, "FittedMember")
      .def_readonly("weights", &FittedMember::weights)
      .def_readonly("readout", &FittedMember::readout)
      .def_readonly("final_state", &FittedMember::final_state)
      .def_readonly("fit_range", &FittedMember::fit_range);

  py::class_<EnsembleForecast>(m, "EnsembleForecast")
      .def_readonly("members", &EnsembleForecast::members)
      .def_readonly("mean", &EnsembleForecast::mean)
      .def_readonly("lower", &EnsembleForecast::lower)
      .def_readonly("upper", &EnsembleForecast::upper)
      .def_readonly("times", &EnsembleForecast::times)
      .def("quantile", &EnsembleForecast::quantile, py::arg("p"));

  m.def(
      "fit_member",
      [](const QesnConfig& c, const Matrix& responses, const py::object& train, int member_index) {
        return fit_member(c, responses, to_range(train), member_index);
      },
      py::arg("config"), py::arg("responses"), py::arg("train"), py::arg("member_index"));
  m.def(
      "forecast_member",
      [](const FittedMember& member, const Matrix& inputs, const py::object& window) {
        return forecast_member(member, inputs, to_range(window));
      },
      py::arg("member"), py::arg("series"), py::arg("forecast"));
  m.def(
      "run_ensemble",
      [](const QesnConfig& c, const Matrix& responses, const py::object& train, const py::object& window,
         int threads) {
        const TimeRange tr = to_range(train), fr = to_range(window);
        py::gil_scoped_release release;
        return run_ensemble(c, responses, tr, fr, threads);
      },
      py::arg("config"), py::arg("responses"), py::arg("train"), py::arg("forecast"), py::arg("threads") = 0);

  // --- lorenz96 ------------------------------------------------------------
  py::class_<Lorenz96Config>(m, "Lorenz96Config")
      .def(py::init<>())
      .def_readwrite("n_sites", &Lorenz96Config::n_sites)
      .def_readwrite("forcing", &Lorenz96Config::forcing)
      .def_readwrite("dt", &Lorenz96Config::dt)
      .def_readwrite("euler_substeps", &Lorenz96Config::euler_substeps)
      .def_readwrite("sigma_eta", &Lorenz96Config::sigma_eta)
      .def_readwrite("n_periods", &Lorenz96Config::n_periods)
      .def_readwrite("burn_in", &Lorenz96Config::burn_in)
      .def_readwrite("seed", &Lorenz96Config::seed)
      .def_readwrite("initial_state", &Lorenz96Config::initial_state)
      .def_readwrite("perturbation_sd", &Lorenz96Config::perturbation_sd);

  py::class_<Lorenz96Run>(m, "Lorenz96Run")
      .def_readonly("latent", &Lorenz96Run::latent)
      .def_readonly("observed", &Lorenz96Run::observed);

  m.def("lorenz96_derivative", &lorenz96_derivative, py::arg("z"), py::arg("forcing"));
  m.def("simulate_lorenz96", &simulate_lorenz96, py::arg("config"));

  // --- eof -----------------------------------------------------------------
  py::class_<EofBasis>(m, "EofBasis")
      .def_readonly("Psi", &EofBasis::Psi)
      .def_readonly("coefficients", &EofBasis::coefficients)
      .def_readonly("explained_variance", &EofBasis::explained_variance)
      .def_readonly("column_means", &EofBasis::column_means)
      .def_readonly("weights", &EofBasis::weights);

  m.def("eof_decompose", py::overload_cast<const Matrix&, Index>(&eof_decompose), py::arg("values"),
        py::arg("n_eof"));
  m.def("project", &project, py::arg("basis"), py::arg("field_rows"));
  m.def("reconstruct", &reconstruct, py::arg("basis"), py::arg("coefficient_rows"));
  m.def(
      "compute_anomalies",
      [](const Matrix& values, const std::vector<std::pair<int, int>>& months, const std::vector<double>& lats,
         const std::vector<double>& lons, std::pair<int, int> years) {
        GriddedField f;
        f.values = values;
        f.lats = lats;
        f.lons = lons;
        for (auto [y, mo] : months) f.time_index.push_back({y, mo});
        return compute_anomalies(f, {years.first, years.second}).values;
      },
      py::arg("values"), py::arg("months"), py::arg("lats"), py::arg("lons"),
      py::arg("climatology") = std::pair<int, int>{1981, 2010});
  m.def(
      "nino34_average",
      [](const Vector& row, const std::vector<double>& lats, const std::vector<double>& lons) {
        return nino34_average(row, lats, lons);
      },
      py::arg("field_row"), py::arg("lats"), py::arg("lons"));

  // --- metrics -------------------------------------------------------------
  py::class_<ScoreReport>(m, "ScoreReport")
      .def_readonly("overall_mse", &ScoreReport::overall_mse)
      .def_readonly("regional_mse", &ScoreReport::regional_mse)
      .def_readonly("crps", &ScoreReport::crps)
      .def_readonly("coverage_95", &ScoreReport::coverage_95)
      .def("to_text", &ScoreReport::to_text);

  m.def("mse", &mse, py::arg("pred"), py::arg("truth"));
  m.def(
      "crps_ensemble",
      [](const std::vector<double>& members, double obs, bool fair) { return crps_ensemble(members, obs, fair); },
      py::arg("members"), py::arg("observation"), py::arg("fair") = false);
  m.def("interval_coverage", &interval_coverage, py::arg("lower"), py::arg("upper"), py::arg("truth"));
  m.def("score_series", &score_series, py::arg("forecast"), py::arg("truth"));

  // --- tuning --------------------------------------------------------------
  py::enum_<Objective>(m, "Objective")
      .value("overall_mse", Objective::OverallMse)
      .value("regional_mse", Objective::RegionalMse);

  py::class_<TuningGrid>(m, "TuningGrid")
      .def(py::init<>())
      .def_readwrite("n_h_values", &TuningGrid::n_h_values)
      .def_readwrite("nu_values", &TuningGrid::nu_values)
      .def_readwrite("r_v_values", &TuningGrid::r_v_values)
      .def_readwrite("m_values", &TuningGrid::m_values)
      .def_readwrite("alpha_values", &TuningGrid::alpha_values)
      .def_readwrite("objective", &TuningGrid::objective)
      .def("size", &TuningGrid::size)
      .def_static("lorenz_default", &TuningGrid::lorenz_default);

  py::class_<TuningEntry>(m, "TuningEntry")
      .def_readonly("config", &TuningEntry::config)
      .def_readonly("score", &TuningEntry::score)
      .def_readonly("error", &TuningEntry::error);

  py::class_<TuningResult>(m, "TuningResult")
      .def_readonly("best_config", &TuningResult::best_config)
      .def_readonly("best_score", &TuningResult::best_score)
      .def_readonly("best_index", &TuningResult::best_index)
      .def_readonly("table", &TuningResult::table);

  m.def(
      "grid_search",
      [](const TuningGrid& grid, const Matrix& responses, const py::object& train, const py::object& validation,
         const QesnConfig& base, int threads) {
        const TimeRange tr = to_range(train), vr = to_range(validation);
        py::gil_scoped_release release;
        return grid_search(grid, responses, responses, tr, vr, base, std::nullopt, threads);
      },
      py::arg("grid"), py::arg("responses"), py::arg("train"), py::arg("validation"), py::arg("base"),
      py::arg("threads") = 0);

  // --- command pipelines ---------------------------------------------------
  m.def(
      "run_command",
      [](const std::string& command, const std::filesystem::path& config_path, int threads) {
        const RunConfig cfg = load_run_config(config_path);
        py::gil_scoped_release release;
        if (command == "simulate") {
          cmd_simulate(cfg);
        } else if (command == "eof") {
          cmd_eof(cfg);
        } else if (command == "tune") {
          cmd_tune(cfg, threads);
        } else if (command == "forecast") {
          cmd_forecast(cfg, threads);
        } else {
          throw InvalidArgument("unknown command '" + command + "'");
        }
      },
      py::arg("command"), py::arg("config"), py::arg("threads") = 0);
}
