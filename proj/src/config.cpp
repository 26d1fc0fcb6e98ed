#include "qesn/config.hpp"

#include <fstream>
#include <set>

namespace qesn {

using nlohmann::json;

namespace {

/// Typed reader over one JSON object that tracks which keys were consumed.
class Section {
 public:
  Section(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw InvalidArgument("config: '" + path_ + "' must be an object");
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  template <class T>
  void read(const std::string& key, T& out) {
    if (!obj_.contains(key)) return;
    seen_.insert(key);
    try {
      out = obj_.at(key).get<T>();
    } catch (const json::exception&) {
      throw InvalidArgument("config: '" + name(key) + "' has the wrong type");
    }
  }

  const json& child(const std::string& key) {
    seen_.insert(key);
    return obj_.at(key);
  }

  std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) throw InvalidArgument("config: unknown key '" + name(it.key()) + "'");
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

TimeRange read_range(Section& s, const std::string& key) {
  std::vector<long long> v;
  s.read(key, v);
  if (v.size() != 2 || v[0] < 0 || v[1] <= v[0]) {
    throw InvalidArgument("config: '" + s.name(key) + "' must be [begin, end) with 0 <= begin < end");
  }
  return {static_cast<Index>(v[0]), static_cast<Index>(v[1])};
}

}  // namespace

void RunConfig::apply_seed(std::uint64_t s) {
  seed = s;
  qesn.reservoir.seed = s;
  lorenz96.seed = s;
}

RunConfig parse_run_config(const json& doc, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  Section top(doc, "");
  top.read("seed", cfg.seed);
  std::string output;
  top.read("output", output);
  if (!output.empty()) cfg.output = output;

  if (top.has("data")) {
    Section s(top.child("data"), "data");
    DataSection d;
    std::string kind = "series", path, truth;
    s.read("kind", kind);
    s.read("path", path);
    s.read("truth_path", truth);
    s.finish();
    if (kind == "series") {
      d.kind = DataKind::Series;
    } else if (kind == "grid") {
      d.kind = DataKind::Grid;
    } else {
      throw InvalidArgument("config: 'data.kind' must be series or grid");
    }
    if (path.empty()) throw InvalidArgument("config: 'data.path' is required");
    d.path = base_dir / path;
    if (!truth.empty()) d.truth_path = base_dir / truth;
    cfg.data = d;
  }

  if (top.has("lorenz96")) {
    Section s(top.child("lorenz96"), "lorenz96");
    auto& l = cfg.lorenz96;
    s.read("n_sites", l.n_sites);
    s.read("forcing", l.forcing);
    s.read("dt", l.dt);
    s.read("euler_substeps", l.euler_substeps);
    s.read("sigma_eta", l.sigma_eta);
    s.read("n_periods", l.n_periods);
    s.read("burn_in", l.burn_in);
    s.read("perturbation_sd", l.perturbation_sd);
    if (s.has("initial_state")) {
      const json& init = s.child("initial_state");
      if (init.is_string()) {
        if (init.get<std::string>() != "perturbed-equilibrium") {
          throw InvalidArgument("config: 'lorenz96.initial_state' must be a list or \"perturbed-equilibrium\"");
        }
      } else {
        try {
          const auto v = init.get<std::vector<double>>();
          l.initial_state = Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
        } catch (const json::exception&) {
          throw InvalidArgument("config: 'lorenz96.initial_state' must be a list of numbers");
        }
      }
    }
    s.finish();
  }

  if (top.has("windows")) {
    Section s(top.child("windows"), "windows");
    if (s.has("train")) cfg.windows.train = read_range(s, "train");
    if (s.has("validation")) cfg.windows.validation = read_range(s, "validation");
    if (s.has("forecast")) cfg.windows.forecast = read_range(s, "forecast");
    s.finish();
  }

  if (top.has("reservoir")) {
    Section s(top.child("reservoir"), "reservoir");
    auto& r = cfg.qesn.reservoir;
    s.read("n_h", r.n_h);
    s.read("nu", r.nu);
    s.read("pi_w", r.pi_w);
    s.read("pi_u", r.pi_u);
    s.read("a_w", r.a_w);
    s.read("a_u", r.a_u);
    s.read("alpha", r.alpha);
    std::string act = to_string(r.activation);
    s.read("activation", act);
    r.activation = parse_activation(act);
    s.finish();
  }

  if (top.has("embedding")) {
    Section s(top.child("embedding"), "embedding");
    auto& e = cfg.qesn.embedding;
    s.read("lead", e.lead);
    s.read("tau", e.tau);
    s.read("m", e.m);
    s.read("include_intercept", e.include_intercept);
    s.read("normalize", e.normalize);
    s.finish();
  }

  if (top.has("ensemble")) {
    Section s(top.child("ensemble"), "ensemble");
    auto& q = cfg.qesn;
    s.read("K", q.K);
    s.read("r_v", q.r_v);
    s.read("include_quadratic", q.include_quadratic);
    s.read("include_embedding", q.include_embedding);
    s.read("add_residual_noise", q.add_residual_noise);
    long long washout = q.washout;
    s.read("washout", washout);
    q.washout = static_cast<Index>(washout);
    s.read("interval_level", q.interval_level);
    s.finish();
  }

  if (top.has("eof")) {
    Section s(top.child("eof"), "eof");
    auto& e = cfg.eof;
    s.read("n_eof", e.n_eof);
    s.read("anomalies", e.anomalies);
    if (s.has("climatology")) {
      std::vector<int> years;
      s.read("climatology", years);
      if (years.size() != 2 || years[0] > years[1]) {
        throw InvalidArgument("config: 'eof.climatology' must be [first_year, last_year]");
      }
      e.climatology = {years[0], years[1]};
    }
    s.read("latitude_weighting", e.latitude_weighting);
    if (s.has("region")) {
      std::vector<double> box;
      s.read("region", box);
      if (box.size() != 4 || box[0] > box[1] || box[2] > box[3]) {
        throw InvalidArgument("config: 'eof.region' must be [lat_min, lat_max, lon_min, lon_max]");
      }
      e.region = {box[0], box[1], box[2], box[3]};
    }
    s.finish();
    detail::require(e.n_eof >= 1, "config: 'eof.n_eof' must be >= 1");
  }

  if (top.has("grid")) {
    Section s(top.child("grid"), "grid");
    TuningGrid g;
    s.read("n_h", g.n_h_values);
    s.read("nu", g.nu_values);
    s.read("r_v", g.r_v_values);
    s.read("m", g.m_values);
    s.read("alpha", g.alpha_values);
    std::string objective = to_string(g.objective);
    s.read("objective", objective);
    g.objective = parse_objective(objective);
    s.finish();
    g.validate();
    cfg.grid = g;
  }

  top.finish();
  cfg.apply_seed(cfg.seed);
  cfg.qesn.validate();
  cfg.lorenz96.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidArgument("config: " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_run_config(doc, path.parent_path());
}

json to_json(const RunConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["output"] = c.output.string();
  if (c.data) {
    j["data"]["kind"] = c.data->kind == DataKind::Series ? "series" : "grid";
    j["data"]["path"] = std::filesystem::absolute(c.data->path).string();
    if (!c.data->truth_path.empty()) j["data"]["truth_path"] = std::filesystem::absolute(c.data->truth_path).string();
  }
  const auto& l = c.lorenz96;
  j["lorenz96"] = {{"n_sites", l.n_sites},     {"forcing", l.forcing},     {"dt", l.dt},
                   {"euler_substeps", l.euler_substeps},
                   {"sigma_eta", l.sigma_eta}, {"n_periods", l.n_periods}, {"burn_in", l.burn_in},
                   {"perturbation_sd", l.perturbation_sd}};
  if (l.initial_state) {
    j["lorenz96"]["initial_state"] = std::vector<double>(l.initial_state->data(),
                                                         l.initial_state->data() + l.initial_state->size());
  }
  auto range = [](const TimeRange& r) { return json::array({r.begin, r.end}); };
  j["windows"] = json::object();
  if (c.windows.train) j["windows"]["train"] = range(*c.windows.train);
  if (c.windows.validation) j["windows"]["validation"] = range(*c.windows.validation);
  if (c.windows.forecast) j["windows"]["forecast"] = range(*c.windows.forecast);
  const auto& r = c.qesn.reservoir;
  j["reservoir"] = {{"n_h", r.n_h},   {"nu", r.nu},   {"pi_w", r.pi_w},   {"pi_u", r.pi_u},
                    {"a_w", r.a_w},   {"a_u", r.a_u}, {"alpha", r.alpha}, {"activation", to_string(r.activation)}};
  const auto& e = c.qesn.embedding;
  j["embedding"] = {{"lead", e.lead},
                    {"tau", e.tau},
                    {"m", e.m},
                    {"include_intercept", e.include_intercept},
                    {"normalize", e.normalize}};
  const auto& q = c.qesn;
  j["ensemble"] = {{"K", q.K},
                   {"r_v", q.r_v},
                   {"include_quadratic", q.include_quadratic},
                   {"include_embedding", q.include_embedding},
                   {"add_residual_noise", q.add_residual_noise},
                   {"washout", q.washout},
                   {"interval_level", q.interval_level}};
  const auto& eo = c.eof;
  j["eof"] = {{"n_eof", eo.n_eof},
              {"anomalies", eo.anomalies},
              {"climatology", {eo.climatology.first, eo.climatology.last}},
              {"latitude_weighting", eo.latitude_weighting},
              {"region", {eo.region.lat_min, eo.region.lat_max, eo.region.lon_min, eo.region.lon_max}}};
  if (c.grid) {
    j["grid"] = {{"n_h", c.grid->n_h_values}, {"nu", c.grid->nu_values},       {"r_v", c.grid->r_v_values},
                 {"m", c.grid->m_values},     {"alpha", c.grid->alpha_values}, {"objective", to_string(c.grid->objective)}};
  }
  return j;
}

}  // namespace qesn
