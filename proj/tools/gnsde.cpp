// Command-line entry point: train | predict | experiment.
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "gnsde/baselines.hpp"
#include "gnsde/checkpoint.hpp"
#include "gnsde/config.hpp"
#include "gnsde/error.hpp"
#include "gnsde/metrics.hpp"
#include "gnsde/parallel.hpp"
#include "gnsde/tables.hpp"

namespace fs = std::filesystem;
using namespace gnsde;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

struct CommonOptions {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> parallel;
  std::optional<std::size_t> samples;
  bool dry_run = false;
};

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("gnsde");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* level = std::getenv("GNSDE_LOG");
  const std::string name = level ? level : "info";
  if (name == "error") {
    spdlog::set_level(spdlog::level::err);
  } else if (name == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else {
    spdlog::set_level(spdlog::level::info);
    if (name != "info") spdlog::warn("GNSDE_LOG='{}' not recognized; using info", name);
  }
}

RunConfig resolve_config(const CommonOptions& opts, ConfigUse use) {
  RunConfig config = opts.config.empty() ? parse_run_config(nlohmann::json::object(), use)
                                         : load_run_config(opts.config, use);
  if (opts.seed) {
    config.seed = *opts.seed;
    config.seeds = {*opts.seed};
  }
  if (opts.parallel) {
    if (*opts.parallel == 0) throw ConfigError("--parallel", "must be at least 1");
    config.parallel = *opts.parallel;
  }
  if (opts.samples) {
    if (*opts.samples == 0) throw ConfigError("--samples", "must be at least 1");
    config.mc_samples = *opts.samples;
  }
  return config;
}

void write_echo(const fs::path& out, const RunConfig& config) {
  fs::create_directories(out);
  std::ofstream echo(out / "config.json");
  echo << to_json(config).dump(2) << '\n';
}

NodeClassificationData load_classification(const RunConfig& config) {
  if (config.task == Task::planetoid) return load_planetoid(config.planetoid_dir, config.seed);
  return gen_voting(config.voting);
}

TemporalRegressionData load_regression(const RunConfig& config) {
  return gen_three_node(config.n_obs, config.voting.seed, config.obs_noise);
}

ModelConfig sized_model(const RunConfig& config, std::size_t input_dim, std::size_t output_dim) {
  ModelConfig m = config.model;
  m.input_dim = input_dim;
  m.output_dim = output_dim;
  if (config.regression_task()) {
    m.likelihood = LikelihoodKind::gaussian;
    m.time_input = m.kind == ModelKind::gcn;
  } else {
    m.likelihood = LikelihoodKind::categorical;
  }
  return m;
}

int cmd_train(const CommonOptions& opts) {
  const auto config = resolve_config(opts, ConfigUse::train);
  const fs::path out = opts.out;
  if (opts.dry_run) {
    fmt::print("train {} on {} for {} epochs, grid [0, {}] in {} steps, seed {} -> {}\n",
               to_string(config.model.kind), to_string(config.task), config.train.epochs, config.t1,
               config.solver_steps, config.seed, out.string());
    return 0;
  }
  write_echo(out, config);
  TrainConfig train = config.train;
  train.seed = config.seed;
  const auto grid = config.grid();
  std::unique_ptr<NodeModel> model;
  std::vector<EpochRecord> trace;
  if (config.regression_task()) {
    const auto data = load_regression(config);
    const auto adj = normalize(data.graph);
    model = make_model(sized_model(config, data.features.cols(), 1));
    trace = gnsde::train(*model, data.features, adj, regression_targets(data, grid, false), grid, train);
  } else {
    const auto data = load_classification(config);
    const auto adj = normalize(data.graph);
    model = make_model(sized_model(config, data.features.cols(), std::max<std::size_t>(data.num_classes(), 2)));
    trace = gnsde::train(*model, data.features, adj, class_targets(data, Split::train), grid, train);
    const auto summary = mc_predict(*model, data.features, adj, grid, model->stochastic() ? config.mc_samples : 1,
                                    config.seed);
    const auto test = data.mask(Split::test);
    if (std::any_of(test.begin(), test.end(), [](auto m) { return m; })) {
      spdlog::info("test accuracy {:.4f}", accuracy(summary.predicted_classes(), data.labels, test));
    }
  }
  CsvTable table({"epoch", "loss", "nll", "kl"});
  for (const auto& r : trace) table.add_row({static_cast<std::int64_t>(r.epoch), r.loss, r.nll, r.kl});
  table.write(out / "trace.csv");
  save_checkpoint(out / "checkpoint.json", *model, to_json(config));
  if (!trace.empty()) spdlog::info("final loss {:.6f} after {} epochs", trace.back().loss, trace.size());
  spdlog::info("wrote {}", out.string());
  return 0;
}

void check_input_dim(const NodeModel& model, const Tensor& features) {
  if (model.config().input_dim != features.cols()) {
    throw DimensionError("checkpoint expects " + std::to_string(model.config().input_dim) +
                         " feature columns but the data has shape " + to_string(features.shape()));
  }
}

PredictiveSummary predict_summary(const NodeModel& model, const RunConfig& config, const Tensor& x,
                                  const NormalizedAdjacency& adj, const TimeGrid& grid,
                                  std::span<const GridObservation> points) {
  const double rate = model.config().dropout;
  const std::size_t n = config.mc_samples;
  if (points.empty()) {
    if (rate > 0.0) return mc_dropout_predict(model, x, adj, grid, rate, n, config.seed, config.parallel);
    return mc_predict(model, x, adj, grid, model.stochastic() ? n : 1, config.seed, config.parallel);
  }
  if (rate > 0.0) {
    return mc_dropout_predict_points(model, x, adj, grid, points, rate, n, config.seed, config.parallel);
  }
  return mc_predict_points(model, x, adj, grid, points, model.stochastic() ? n : 1, config.seed, 0.0,
                           config.parallel);
}

int cmd_predict(const CommonOptions& opts, const std::string& checkpoint) {
  const auto config = resolve_config(opts, ConfigUse::predict);
  const fs::path out = opts.out;
  if (opts.dry_run) {
    fmt::print("predict with {} on {} using {} samples -> {}\n", checkpoint, to_string(config.task),
               config.mc_samples, out.string());
    return 0;
  }
  const auto loaded = load_checkpoint(checkpoint);
  const auto& model = *loaded.model;
  const auto grid = config.grid();
  write_echo(out, config);

  std::vector<std::string> header;
  std::vector<std::vector<CsvCell>> rows;
  auto flags = [&](double uncertainty) {
    std::vector<CsvCell> cells;
    for (double t : config.thresholds) cells.emplace_back(static_cast<std::int64_t>(uncertainty < t ? 1 : 0));
    return cells;
  };
  std::vector<std::string> flag_names;
  for (double t : config.thresholds) flag_names.push_back("retained_lt_" + format_number(t));

  if (config.regression_task()) {
    const auto data = load_regression(config);
    check_input_dim(model, data.features);
    const auto adj = normalize(data.graph);
    std::vector<GridObservation> points;
    for (const auto& o : data.observations) points.push_back({grid.nearest_index(o.time), o.node, o.value});
    const auto summary = predict_summary(model, config, data.features, adj, grid, points);
    header = {"time", "node", "value", "split", "mean", "variance"};
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto& o = data.observations[i];
      std::vector<CsvCell> row{o.time, static_cast<std::int64_t>(o.node), o.value,
                               std::string(o.test ? "test" : "train"), summary.mean[i], summary.variance[i]};
      for (auto& c : flags(summary.variance[i])) row.push_back(std::move(c));
      rows.push_back(std::move(row));
    }
  } else {
    const auto data = load_classification(config);
    check_input_dim(model, data.features);
    const auto adj = normalize(data.graph);
    const auto summary = predict_summary(model, config, data.features, adj, grid, {});
    const auto predicted = summary.predicted_classes();
    header = {"node", "label", "split", "predicted", "entropy"};
    const char* split_names[] = {"", "train", "val", "test"};
    for (std::size_t i = 0; i < data.num_nodes(); ++i) {
      std::vector<CsvCell> row{static_cast<std::int64_t>(i), static_cast<std::int64_t>(data.labels[i]),
                               std::string(split_names[static_cast<int>(data.split[i])]),
                               static_cast<std::int64_t>(predicted[i]), summary.entropy[i]};
      for (auto& c : flags(summary.entropy[i])) row.push_back(std::move(c));
      rows.push_back(std::move(row));
    }
  }
  for (auto& f : flag_names) header.push_back(f);
  CsvTable table(header);
  for (auto& r : rows) table.add_row(std::move(r));
  table.write(out / "predictions.csv");
  spdlog::info("wrote {} predictions to {}", table.rows(), (out / "predictions.csv").string());
  return 0;
}

std::vector<double> curve_values(const RunConfig& config, CurveKind kind) {
  for (const auto& [k, v] : config.curves.values) {
    if (k == kind) return v;
  }
  return default_curve_values(kind);
}

int run_fig2(const RunConfig& config, const fs::path& out, bool dry_run) {
  const auto settings = config.settings();
  for (auto kind : config.curves.curves) {
    CurveSpec spec;
    spec.kind = kind;
    spec.methods = config.curves.methods;
    spec.values = curve_values(config, kind);
    spec.data = config.voting;
    spec.seeds = config.seeds;
    if (dry_run) {
      for (auto m : spec.methods) {
        for (double v : spec.values) {
          fmt::print("fig2_curves {} {} x={} seeds={}\n", to_string(kind), to_string(m), format_number(v),
                     spec.seeds.size());
        }
      }
      continue;
    }
    spdlog::info("curve {}: {} methods x {} values x {} seeds", to_string(kind), spec.methods.size(),
                 spec.values.size(), spec.seeds.size());
    const auto points = run_curve(spec, settings);
    const std::string stem = "fig2_" + std::string(to_string(kind));
    curve_table(kind, points).write(out / (stem + ".csv"));
    write_svg(out / (stem + ".svg"), curve_plot(kind, points));
  }
  return 0;
}

int run_fig3(const RunConfig& config, const fs::path& out, bool dry_run) {
  const auto settings = config.settings();
  std::vector<ActiveTraces> sets;
  for (auto m : config.active.methods) {
    for (auto acq : config.active.acquisitions) {
      if (dry_run) {
        fmt::print("fig3_active {} {} n={} {}->{} seeds={}\n", to_string(m), to_string(acq), config.active.n,
                   config.active.start, config.active.end, config.seeds.size());
        continue;
      }
      ActiveTraces set;
      set.method = m;
      set.acquisition = acq;
      set.seeds = config.seeds;
      set.traces.resize(config.seeds.size());
      spdlog::info("active learning {} / {}", to_string(m), to_string(acq));
      parallel_for(config.seeds.size(), config.parallel, [&](std::size_t s) {
        VotingConfig vc = config.voting;
        vc.n = config.active.n;
        vc.seed = config.seeds[s];
        ActiveLearningConfig al;
        al.start = config.active.start;
        al.end = config.active.end;
        al.epochs_per_round = config.active.epochs_per_round;
        al.acquisition = acq;
        al.seed = config.seeds[s];
        set.traces[s] = active_learning(m, gen_voting(vc), settings, al);
      });
      active_table(set).write(out / fmt::format("fig3_{}_{}.csv", to_string(m), to_string(acq)));
      sets.push_back(std::move(set));
    }
  }
  if (!dry_run) write_svg(out / "fig3_active.svg", active_plot(sets));
  return 0;
}

int run_table2(const RunConfig& config, const fs::path& out, bool dry_run) {
  if (dry_run) {
    for (auto m : config.regression.methods) {
      fmt::print("table2_regression {} n_obs={} thresholds={} seeds={}\n", to_string(m), config.regression.n_obs,
                 config.regression.thresholds.size(), config.seeds.size());
    }
    return 0;
  }
  RegressionSpec spec = config.regression;
  spec.seeds = config.seeds;
  const auto runs = run_regression_table(spec, config.regression_settings());
  regression_threshold_table(runs).write(out / "table2_thresholds.csv");
  regression_variance_table(runs).write(out / "table2_variance.csv");
  write_svg(out / "table2_nll.svg", regression_plot(runs));
  return 0;
}

int cmd_experiment(const CommonOptions& opts, const std::string& name) {
  const auto config = resolve_config(opts, ConfigUse::experiment);
  const fs::path out = opts.out;
  if (!opts.dry_run) write_echo(out, config);
  if (name == "fig2_curves") return run_fig2(config, out, opts.dry_run);
  if (name == "fig3_active") return run_fig3(config, out, opts.dry_run);
  if (name == "table2_regression") return run_table2(config, out, opts.dry_run);
  throw ConfigError("experiment", "unknown experiment '" + name +
                                      "' (valid: fig2_curves, fig3_active, table2_regression)");
}

void add_common(CLI::App* cmd, CommonOptions& opts, bool config_required) {
  auto* c = cmd->add_option("--config", opts.config, "JSON run configuration");
  if (config_required) c->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", opts.out, "output directory")->capture_default_str();
  cmd->add_option("--seed", opts.seed, "override the run seed (and the experiment seed list)");
  cmd->add_option("--parallel", opts.parallel, "worker threads for Monte-Carlo samples and experiment cells");
  cmd->add_flag("--dry-run", opts.dry_run, "print the planned work without training");
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Latent graph neural SDEs: training, prediction and experiments"};
  app.require_subcommand(1);

  CommonOptions train_opts, predict_opts, exp_opts;
  std::string checkpoint, experiment;

  auto* train = app.add_subcommand("train", "train a model and write checkpoint, trace and config echo");
  add_common(train, train_opts, true);

  auto* predict = app.add_subcommand("predict", "per-node predictions with uncertainty from a checkpoint");
  add_common(predict, predict_opts, true);
  predict->add_option("--checkpoint", checkpoint, "checkpoint written by train")->required();
  predict->add_option("--samples", predict_opts.samples, "Monte-Carlo samples (overrides predict.samples)");

  auto* exp = app.add_subcommand("experiment", "run a named experiment and write CSV tables and SVG plots");
  exp->add_option("name", experiment, "fig2_curves | fig3_active | table2_regression")->required();
  add_common(exp, exp_opts, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    return app.exit(err) == 0 ? 0 : kExitUsage;
  }

  try {
    if (train->parsed()) return cmd_train(train_opts);
    if (predict->parsed()) return cmd_predict(predict_opts, checkpoint);
    return cmd_experiment(exp_opts, experiment);
  } catch (const ConfigError& err) {
    spdlog::error("{}", err.what());
    return kExitUsage;
  } catch (const DivergenceError& err) {
    spdlog::error("{}", err.what());
    return kExitRuntime;
  } catch (const std::exception& err) {
    spdlog::error("{}", err.what());
    return kExitRuntime;
  }
}
