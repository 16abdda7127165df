#include "gnsde/config.hpp"

#include <cmath>
#include <concepts>
#include <fstream>
#include <limits>
#include <set>

#include "gnsde/error.hpp"

namespace gnsde {

namespace {

using nlohmann::json;

// Reads one JSON object, remembering which keys were consumed so leftovers
// can be reported as unknown fields.
class Reader {
 public:
  Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const std::string& key) const { return obj_.contains(key); }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  Reader child(const std::string& key) {
    static const json empty = json::object();
    const json* v = find(key);
    return Reader(v ? *v : empty, field(key));
  }

  void read(const std::string& key, double& out) {
    if (const json* v = find(key)) out = as_double(*v, field(key));
  }

  template <std::unsigned_integral T>
  void read(const std::string& key, T& out) {
    if (const json* v = find(key)) out = static_cast<T>(as_unsigned(*v, field(key)));
  }

  void read(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(field(key), "expected true or false");
      out = v->get<bool>();
    }
  }

  void read(const std::string& key, std::string& out) {
    if (const json* v = find(key)) out = as_string(*v, field(key));
  }

  template <typename Parse, typename T>
  void read_enum(const std::string& key, T& out, Parse parse) {
    if (const json* v = find(key)) out = parse_named(*v, field(key), parse);
  }

  template <typename Parse, typename T>
  void read_enum_list(const std::string& key, std::vector<T>& out, Parse parse) {
    const json* v = find(key);
    if (!v) return;
    if (!v->is_array() || v->empty()) throw ConfigError(field(key), "expected a non-empty list");
    out.clear();
    for (const auto& item : *v) out.push_back(parse_named(item, field(key), parse));
  }

  void read_doubles(const std::string& key, std::vector<double>& out) {
    if (const json* v = find(key)) out = as_doubles(*v, field(key));
  }

  void read_seeds(const std::string& key, std::vector<std::uint64_t>& out) {
    const json* v = find(key);
    if (!v) return;
    if (!v->is_array() || v->empty()) throw ConfigError(field(key), "expected a non-empty list of seeds");
    out.clear();
    for (const auto& item : *v) out.push_back(as_unsigned(item, field(key)));
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.count(key)) throw ConfigError(field(key), "unknown field");
    }
  }

  static double as_double(const json& v, const std::string& field) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string() && (v.get<std::string>() == "inf" || v.get<std::string>() == "infinity")) {
      return std::numeric_limits<double>::infinity();
    }
    throw ConfigError(field, "expected a number");
  }

  static std::vector<double> as_doubles(const json& v, const std::string& field) {
    if (!v.is_array() || v.empty()) throw ConfigError(field, "expected a non-empty list of numbers");
    std::vector<double> out;
    for (const auto& item : v) out.push_back(as_double(item, field));
    return out;
  }

  static std::uint64_t as_unsigned(const json& v, const std::string& field) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) {
      if (v.get<std::int64_t>() < 0) throw ConfigError(field, "must not be negative");
      return static_cast<std::uint64_t>(v.get<std::int64_t>());
    }
    throw ConfigError(field, "expected a non-negative integer");
  }

  static std::string as_string(const json& v, const std::string& field) {
    if (!v.is_string()) throw ConfigError(field, "expected a string");
    return v.get<std::string>();
  }

 private:
  template <typename Parse>
  static auto parse_named(const json& v, const std::string& field, Parse parse) {
    const auto name = as_string(v, field);
    try {
      return parse(name);
    } catch (const InvalidArgument& err) {
      throw ConfigError(field, err.what());
    }
  }

  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

json number(double v) {
  if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
  return v;
}

json numbers(const std::vector<double>& values) {
  json out = json::array();
  for (double v : values) out.push_back(number(v));
  return out;
}

template <typename T>
json names(const std::vector<T>& values) {
  json out = json::array();
  for (const auto& v : values) out.push_back(std::string(to_string(v)));
  return out;
}

Task parse_task(std::string_view name) {
  if (name == "voting") return Task::voting;
  if (name == "planetoid") return Task::planetoid;
  if (name == "three_node") return Task::three_node;
  throw InvalidArgument("unknown task '" + std::string(name) + "' (expected voting, planetoid, three_node)");
}

void read_model(Reader& r, ModelConfig& m, bool with_dims) {
  if (with_dims) {
    r.read("input_dim", m.input_dim);
    r.read("output_dim", m.output_dim);
  }
  r.read_enum("kind", m.kind, parse_model_kind);
  r.read("latent_dim", m.latent_dim);
  r.read("hidden_dim", m.hidden_dim);
  r.read_enum("encoder", m.encoder, parse_encoder_kind);
  r.read_enum("encoder_activation", m.encoder_activation, parse_activation);
  r.read("drift_layers", m.drift_layers);
  r.read("diffusion", m.diffusion);
  r.read("prior_decay", m.prior_decay);
  r.read_enum("likelihood", m.likelihood, parse_likelihood_kind);
  r.read("obs_variance", m.obs_variance);
  r.read("time_input", m.time_input);
  r.read("dropout", m.dropout);
  r.read("init_seed", m.init_seed);
  r.finish();
}

json model_json(const ModelConfig& m, bool with_dims) {
  json j;
  if (with_dims) {
    j["input_dim"] = m.input_dim;
    j["output_dim"] = m.output_dim;
  }
  j["kind"] = to_string(m.kind);
  j["latent_dim"] = m.latent_dim;
  j["hidden_dim"] = m.hidden_dim;
  j["encoder"] = to_string(m.encoder);
  j["encoder_activation"] = to_string(m.encoder_activation);
  j["drift_layers"] = m.drift_layers;
  j["diffusion"] = m.diffusion;
  j["prior_decay"] = m.prior_decay;
  j["likelihood"] = to_string(m.likelihood);
  j["obs_variance"] = m.obs_variance;
  j["time_input"] = m.time_input;
  j["dropout"] = m.dropout;
  j["init_seed"] = m.init_seed;
  return j;
}

void check(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(field, what);
}

}  // namespace

std::string_view to_string(Task task) {
  switch (task) {
    case Task::voting:
      return "voting";
    case Task::planetoid:
      return "planetoid";
    case Task::three_node:
      return "three_node";
  }
  return "?";
}

ExperimentSettings RunConfig::settings() const {
  ExperimentSettings s;
  s.model = model;
  s.t1 = t1;
  s.solver_steps = solver_steps;
  s.train = train;
  s.mc_samples = mc_samples;
  s.dropout_rate = dropout_rate;
  s.ensemble_members = ensemble_members;
  s.workers = parallel;
  return s;
}

ExperimentSettings RunConfig::regression_settings() const {
  auto s = settings();
  s.model.likelihood = LikelihoodKind::gaussian;
  s.t1 = regression_t1;
  s.solver_steps = regression_steps;
  s.train.epochs = regression_epochs;
  return s;
}

RunConfig parse_run_config(const json& doc, ConfigUse use) {
  Reader root(doc, "");
  RunConfig c;
  const bool needs_model = use != ConfigUse::experiment;
  if (needs_model && !root.has("task")) throw ConfigError("task", "required field is missing");
  root.read_enum("task", c.task, parse_task);

  // Task-dependent defaults, overridden below by explicit fields.
  const auto defaults = c.regression_task() ? regression_defaults() : classification_defaults();
  c.model = defaults.model;
  c.t1 = defaults.t1;
  c.solver_steps = defaults.solver_steps;
  c.train = defaults.train;
  c.thresholds = c.regression_task() ? std::vector<double>{3.0, 2.5, 2.0, 1.5, 1.0, 0.5}
                                     : default_curve_values(CurveKind::entropy_threshold);

  {
    if (needs_model && !(root.has("model") && doc["model"].is_object() && doc["model"].contains("kind"))) {
      throw ConfigError("model.kind", "required field is missing");
    }
    auto r = root.child("model");
    read_model(r, c.model, false);
  }
  {
    auto r = root.child("data");
    r.read("n", c.voting.n);
    r.read("train_frac", c.voting.train_frac);
    r.read("homophily", c.voting.homophily);
    r.read("noise_sd", c.voting.noise_sd);
    r.read("cluster_radius", c.voting.cluster_radius);
    r.read("mean_degree", c.voting.mean_degree);
    r.read("seed", c.voting.seed);
    std::string dir;
    r.read("path", dir);
    c.planetoid_dir = dir;
    r.read("n_obs", c.n_obs);
    r.read("obs_noise", c.obs_noise);
    r.finish();
  }
  {
    auto r = root.child("solver");
    r.read("t1", c.t1);
    r.read("steps", c.solver_steps);
    r.finish();
  }
  {
    auto r = root.child("train");
    r.read("epochs", c.train.epochs);
    r.read("lr", c.train.adam.lr);
    r.read("beta1", c.train.adam.beta1);
    r.read("beta2", c.train.adam.beta2);
    r.read("eps", c.train.adam.eps);
    r.finish();
  }
  {
    auto r = root.child("predict");
    r.read("samples", c.mc_samples);
    r.read("dropout_rate", c.dropout_rate);
    r.read("ensemble_members", c.ensemble_members);
    r.read_doubles("thresholds", c.thresholds);
    r.finish();
  }
  root.read("seed", c.seed);
  root.read_seeds("seeds", c.seeds);
  root.read("parallel", c.parallel);
  {
    auto ex = root.child("experiments");
    {
      auto r = ex.child("fig2_curves");
      r.read_enum_list("curves", c.curves.curves, parse_curve_kind);
      r.read_enum_list("methods", c.curves.methods, parse_method);
      auto v = r.child("values");
      for (auto kind : {CurveKind::train_fraction, CurveKind::node_count, CurveKind::entropy_threshold,
                        CurveKind::noise_loglik}) {
        const std::string key(to_string(kind));
        if (!v.has(key)) continue;
        std::vector<double> values;
        v.read_doubles(key, values);
        c.curves.values.emplace_back(kind, std::move(values));
      }
      v.finish();
      r.finish();
    }
    {
      auto r = ex.child("fig3_active");
      r.read_enum_list("methods", c.active.methods, parse_method);
      r.read_enum_list("acquisitions", c.active.acquisitions, parse_acquisition);
      r.read("n", c.active.n);
      r.read("start", c.active.start);
      r.read("end", c.active.end);
      r.read("epochs_per_round", c.active.epochs_per_round);
      r.finish();
    }
    {
      auto r = ex.child("table2_regression");
      r.read_enum_list("methods", c.regression.methods, parse_method);
      r.read("n_obs", c.regression.n_obs);
      r.read("noise_sd", c.regression.noise_sd);
      r.read_doubles("thresholds", c.regression.thresholds);
      r.read("t1", c.regression_t1);
      r.read("steps", c.regression_steps);
      r.read("epochs", c.regression_epochs);
      r.finish();
    }
    ex.finish();
  }
  root.finish();

  check(c.solver_steps >= 1, "solver.steps", "must be at least 1");
  check(c.t1 > 0.0, "solver.t1", "must be positive");
  check(c.mc_samples >= 1, "predict.samples", "must be at least 1");
  check(c.dropout_rate > 0.0 && c.dropout_rate < 1.0, "predict.dropout_rate", "must lie in (0, 1)");
  check(c.ensemble_members >= 2, "predict.ensemble_members", "must be at least 2");
  check(c.train.adam.lr > 0.0, "train.lr", "must be positive");
  check(c.regression_steps >= 1 && c.regression_t1 > 0.0, "experiments.table2_regression",
        "needs t1 > 0 and steps >= 1");
  check(c.parallel >= 1, "parallel", "must be at least 1");
  check(c.voting.train_frac > 0.0 && c.voting.train_frac < 1.0, "data.train_frac", "must lie in (0, 1)");
  check(c.voting.n >= 3, "data.n", "must be at least 3");
  check(c.n_obs >= 10, "data.n_obs", "must be at least 10");
  check(c.task != Task::planetoid || !c.planetoid_dir.empty() || use == ConfigUse::experiment, "data.path",
        "required for the planetoid task");
  check(c.active.start >= 1 && c.active.start <= c.active.end && c.active.end <= c.active.n,
        "experiments.fig3_active", "needs 1 <= start <= end <= n");
  try {
    ModelConfig probe = c.model;
    probe.input_dim = 1;
    probe.output_dim = 2;
    probe.validate();
  } catch (const InvalidArgument& err) {
    throw ConfigError("model", err.what());
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path, ConfigUse use) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& err) {
    throw ConfigError("--config", std::string("malformed JSON: ") + err.what());
  }
  return parse_run_config(doc, use);
}

json to_json(const ModelConfig& config) { return model_json(config, true); }

ModelConfig model_config_from_json(const json& doc) {
  ModelConfig m;
  Reader r(doc, "model");
  read_model(r, m, true);
  try {
    m.validate();
  } catch (const InvalidArgument& err) {
    throw ConfigError("model", err.what());
  }
  return m;
}

json to_json(const RunConfig& c) {
  json j;
  j["task"] = to_string(c.task);
  j["model"] = model_json(c.model, false);
  j["data"] = {{"n", c.voting.n},
               {"train_frac", c.voting.train_frac},
               {"homophily", c.voting.homophily},
               {"noise_sd", c.voting.noise_sd},
               {"cluster_radius", c.voting.cluster_radius},
               {"mean_degree", c.voting.mean_degree},
               {"seed", c.voting.seed},
               {"path", c.planetoid_dir.string()},
               {"n_obs", c.n_obs},
               {"obs_noise", c.obs_noise}};
  j["solver"] = {{"t1", c.t1}, {"steps", c.solver_steps}};
  j["train"] = {{"epochs", c.train.epochs},
                {"lr", c.train.adam.lr},
                {"beta1", c.train.adam.beta1},
                {"beta2", c.train.adam.beta2},
                {"eps", c.train.adam.eps}};
  j["predict"] = {{"samples", c.mc_samples},
                  {"dropout_rate", c.dropout_rate},
                  {"ensemble_members", c.ensemble_members},
                  {"thresholds", numbers(c.thresholds)}};
  j["seed"] = c.seed;
  j["seeds"] = c.seeds;
  j["parallel"] = c.parallel;
  json values = json::object();
  for (const auto& [kind, v] : c.curves.values) values[std::string(to_string(kind))] = numbers(v);
  j["experiments"] = {
      {"fig2_curves", {{"curves", names(c.curves.curves)}, {"methods", names(c.curves.methods)}, {"values", values}}},
      {"fig3_active",
       {{"methods", names(c.active.methods)},
        {"acquisitions", names(c.active.acquisitions)},
        {"n", c.active.n},
        {"start", c.active.start},
        {"end", c.active.end},
        {"epochs_per_round", c.active.epochs_per_round}}},
      {"table2_regression",
       {{"methods", names(c.regression.methods)},
        {"n_obs", c.regression.n_obs},
        {"noise_sd", c.regression.noise_sd},
        {"thresholds", numbers(c.regression.thresholds)},
        {"t1", c.regression_t1},
        {"steps", c.regression_steps},
        {"epochs", c.regression_epochs}}}};
  return j;
}

}  // namespace gnsde
