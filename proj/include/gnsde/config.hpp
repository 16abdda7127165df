#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gnsde/datasets.hpp"
#include "gnsde/experiments.hpp"

namespace gnsde {

enum class Task { voting, planetoid, three_node };

std::string_view to_string(Task task);

struct CurvesBlock {
  std::vector<CurveKind> curves{CurveKind::train_fraction, CurveKind::node_count, CurveKind::entropy_threshold,
                                CurveKind::noise_loglik};
  std::vector<Method> methods{Method::gcn, Method::gnode, Method::gnsde, Method::ensemble_gcn};
  /// Sweep values per curve; curves without an entry use default_curve_values.
  std::vector<std::pair<CurveKind, std::vector<double>>> values;
};

struct ActiveBlock {
  std::vector<Method> methods{Method::gnsde};
  std::vector<Acquisition> acquisitions{Acquisition::random, Acquisition::max_entropy};
  std::size_t n = 100;
  std::size_t start = 10;
  std::size_t end = 80;
  std::size_t epochs_per_round = 5;
};

/// Everything a run needs. Serializes to a JSON document with every field
/// spelled out, so the echo written beside each output reproduces the run.
struct RunConfig {
  Task task = Task::voting;
  ModelConfig model;
  VotingConfig voting;
  std::filesystem::path planetoid_dir;
  std::size_t n_obs = 100;
  double obs_noise = 0.5;
  double t1 = 1.0;
  std::size_t solver_steps = 10;
  TrainConfig train;
  std::size_t mc_samples = 50;
  double dropout_rate = 0.2;
  std::size_t ensemble_members = 5;
  std::vector<double> thresholds;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> seeds{0, 1, 2};
  std::size_t parallel = 1;
  CurvesBlock curves;
  ActiveBlock active;
  RegressionSpec regression;
  /// Solver horizon, steps and epochs of the regression experiment, which
  /// runs on the three-node data whatever `task` says.
  double regression_t1 = 12.0;
  std::size_t regression_steps = 120;
  std::size_t regression_epochs = 500;

  bool regression_task() const noexcept { return task == Task::three_node; }
  TimeGrid grid() const { return {0.0, t1, solver_steps}; }
  /// Settings for the experiment drivers.
  ExperimentSettings settings() const;
  ExperimentSettings regression_settings() const;
};

enum class ConfigUse { train, predict, experiment };

/// Builds a RunConfig from JSON. Missing keys take task-dependent defaults;
/// unknown keys, wrong types and out-of-range values throw ConfigError
/// naming the field. Training and prediction require "task" and
/// "model.kind".
RunConfig parse_run_config(const nlohmann::json& doc, ConfigUse use);
RunConfig load_run_config(const std::filesystem::path& path, ConfigUse use);

nlohmann::json to_json(const RunConfig& config);
nlohmann::json to_json(const ModelConfig& config);
/// Inverse of to_json(ModelConfig); throws ConfigError on bad fields.
ModelConfig model_config_from_json(const nlohmann::json& doc);

}  // namespace gnsde
