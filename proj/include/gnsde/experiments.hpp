#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gnsde/datasets.hpp"
#include "gnsde/metrics.hpp"
#include "gnsde/model.hpp"
#include "gnsde/train.hpp"

namespace gnsde {

/// Model plus uncertainty method compared by the experiment drivers.
enum class Method { gcn, gnode, gnsde, ensemble_gcn, dropout_gcn, dropout_gnode };

std::string_view to_string(Method method);
/// Throws InvalidArgument listing the valid names.
Method parse_method(std::string_view name);

/// Settings shared by every cell of an experiment. `model` is a template:
/// kind, dimensions, likelihood and dropout are filled in per method.
struct ExperimentSettings {
  ModelConfig model;
  double t1 = 1.0;
  std::size_t solver_steps = 10;
  TrainConfig train;
  std::size_t mc_samples = 50;
  double dropout_rate = 0.2;
  std::size_t ensemble_members = 5;
  /// Cells evaluated concurrently.
  std::size_t workers = 1;

  TimeGrid grid() const { return {0.0, t1, solver_steps}; }
};

/// Node classification on the unit time horizon, 60 epochs.
ExperimentSettings classification_defaults();
/// Three-node regression on [0, 12] with 120 solver steps, 500 epochs.
ExperimentSettings regression_defaults();

/// Trains `method` on the train split and returns its predictive summary
/// over all nodes. `seed` drives initialization, training and sampling.
PredictiveSummary fit_predict_classification(Method method, const NodeClassificationData& data,
                                             const ExperimentSettings& settings, std::uint64_t seed);

enum class CurveKind { train_fraction, node_count, entropy_threshold, noise_loglik };

std::string_view to_string(CurveKind kind);
CurveKind parse_curve_kind(std::string_view name);

struct CurveSpec {
  CurveKind kind = CurveKind::train_fraction;
  std::vector<Method> methods;
  /// Sweep values: train fractions, node counts, entropy thresholds or noise sds.
  std::vector<double> values;
  VotingConfig data;
  std::vector<std::uint64_t> seeds{0, 1, 2};
};

/// Default sweep values per curve kind.
std::vector<double> default_curve_values(CurveKind kind);

struct CurvePoint {
  Method method = Method::gcn;
  double x = 0.0;
  /// Mean and sample standard deviation over seeds with a defined metric.
  std::optional<double> mean;
  std::optional<double> sd;
  std::size_t seeds_used = 0;
  std::size_t diverged = 0;
  /// Mean retained fraction (entropy-threshold curves only).
  std::optional<double> coverage;
};

/// Trains each method per sweep value per seed on the voting data. Accuracy
/// is measured on the test split; the noise curve records the mean
/// log-probability of the true class after adding feature noise to every
/// node. Divergent cells are counted, not fatal.
std::vector<CurvePoint> run_curve(const CurveSpec& spec, const ExperimentSettings& settings);

enum class Acquisition { random, max_entropy };

std::string_view to_string(Acquisition acquisition);
Acquisition parse_acquisition(std::string_view name);

struct ActiveLearningConfig {
  std::size_t start = 10;
  std::size_t end = 80;
  std::size_t epochs_per_round = 5;
  Acquisition acquisition = Acquisition::max_entropy;
  std::uint64_t seed = 0;
};

struct ActiveRound {
  std::size_t labeled = 0;
  /// Node added after this round; empty on the last round.
  std::optional<std::size_t> chosen;
  double accuracy = 0.0;
};

/// Pool-based active learning over every node of `data`. Each round trains
/// epochs_per_round more epochs on the labeled set, scores accuracy over all
/// nodes, then labels one more node. Max-entropy picks the unlabeled node
/// with the highest predictive entropy (lowest index on ties). Throws
/// InvalidArgument unless start >= 1 and start <= end <= number of nodes.
std::vector<ActiveRound> active_learning(Method method, const NodeClassificationData& data,
                                         const ExperimentSettings& settings, const ActiveLearningConfig& config);

/// Index of the highest entropy among unlabeled nodes, lowest index on ties.
/// Throws InvalidArgument when every node is labeled.
std::size_t max_entropy_pick(std::span<const double> entropy, std::span<const std::uint8_t> labeled);

struct RegressionSpec {
  std::vector<Method> methods{Method::dropout_gcn, Method::gnsde, Method::dropout_gnode, Method::ensemble_gcn};
  std::size_t n_obs = 100;
  double noise_sd = 0.5;
  std::vector<double> thresholds{3.0, 2.5, 2.0, 1.5, 1.0, 0.5};
  std::vector<std::uint64_t> seeds{0, 1, 2};
};

struct RegressionRun {
  Method method = Method::gnsde;
  std::uint64_t seed = 0;
  std::vector<ThresholdRow> rows;
  /// Mean predictive variance at training points and per test window.
  double variance_train = 0.0;
  double variance_interpolation = 0.0;
  double variance_extrapolation = 0.0;
};

/// Trains and evaluates one method on one three-node dataset.
RegressionRun run_regression(Method method, const TemporalRegressionData& data, const ExperimentSettings& settings,
                             std::span<const double> thresholds, std::uint64_t seed);

/// Every method on gen_three_node(n_obs, seed) for every seed.
std::vector<RegressionRun> run_regression_table(const RegressionSpec& spec, const ExperimentSettings& settings);

}  // namespace gnsde
