#include "gnsde/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>

#include "gnsde/baselines.hpp"
#include "gnsde/error.hpp"
#include "gnsde/parallel.hpp"
#include "gnsde/rng.hpp"

namespace gnsde {

namespace {

// Seed streams derived from a cell's seed.
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kTrainStream = 2;
constexpr std::uint64_t kSampleStream = 3;
constexpr std::uint64_t kDataStream = 4;
constexpr std::uint64_t kNoiseStream = 5;
constexpr std::uint64_t kPickStream = 6;

ModelKind kind_of(Method method) {
  switch (method) {
    case Method::gcn:
    case Method::ensemble_gcn:
    case Method::dropout_gcn:
      return ModelKind::gcn;
    case Method::gnode:
    case Method::dropout_gnode:
      return ModelKind::gnode;
    case Method::gnsde:
      return ModelKind::gnsde;
  }
  return ModelKind::gcn;
}

bool uses_dropout(Method method) { return method == Method::dropout_gcn || method == Method::dropout_gnode; }

// One trainable predictor per cell: a single model, or K ensemble members.
class Predictor {
 public:
  Predictor(Method method, const ExperimentSettings& settings, ModelConfig config, std::uint64_t seed)
      : method_(method), settings_(settings), seed_(seed) {
    config.kind = kind_of(method);
    config.dropout = uses_dropout(method) ? settings.dropout_rate : 0.0;
    config.init_seed = rng::derive_seed(seed, kInitStream);
    TrainConfig train = settings.train;
    train.seed = rng::derive_seed(seed, kTrainStream);
    if (method == Method::ensemble_gcn) {
      ensemble_ = std::make_unique<Ensemble>(config, settings.ensemble_members);
      for (std::size_t k = 0; k < ensemble_->size(); ++k) {
        TrainConfig member_train = train;
        member_train.seed = rng::derive_seed(train.seed, k);
        trainers_.emplace_back(ensemble_->member(k), member_train);
      }
    } else {
      model_ = make_model(config);
      trainers_.emplace_back(*model_, train);
    }
  }

  void train(const Tensor& x, const NormalizedAdjacency& adj, const Targets& targets, const TimeGrid& grid,
             std::size_t epochs) {
    for (auto& t : trainers_) t.run(x, adj, targets, grid, epochs);
  }

  PredictiveSummary predict(const Tensor& x, const NormalizedAdjacency& adj, const TimeGrid& grid) const {
    const auto base = rng::derive_seed(seed_, kSampleStream);
    switch (method_) {
      case Method::ensemble_gcn:
        return ensemble_->predict(x, adj, grid);
      case Method::dropout_gcn:
      case Method::dropout_gnode:
        return mc_dropout_predict(*model_, x, adj, grid, settings_.dropout_rate, settings_.mc_samples, base);
      case Method::gnsde:
        return mc_predict(*model_, x, adj, grid, settings_.mc_samples, base);
      case Method::gcn:
      case Method::gnode:
        break;
    }
    return mc_predict(*model_, x, adj, grid, 1, base);
  }

  PredictiveSummary predict_points(const Tensor& x, const NormalizedAdjacency& adj, const TimeGrid& grid,
                                   std::span<const GridObservation> points) const {
    const auto base = rng::derive_seed(seed_, kSampleStream);
    switch (method_) {
      case Method::ensemble_gcn:
        return ensemble_->predict_points(x, adj, grid, points);
      case Method::dropout_gcn:
      case Method::dropout_gnode:
        return mc_dropout_predict_points(*model_, x, adj, grid, points, settings_.dropout_rate,
                                         settings_.mc_samples, base);
      case Method::gnsde:
        return mc_predict_points(*model_, x, adj, grid, points, settings_.mc_samples, base);
      case Method::gcn:
      case Method::gnode:
        break;
    }
    return mc_predict_points(*model_, x, adj, grid, points, 1, base);
  }

 private:
  Method method_;
  const ExperimentSettings& settings_;
  std::uint64_t seed_;
  std::unique_ptr<NodeModel> model_;
  std::unique_ptr<Ensemble> ensemble_;
  std::vector<Trainer> trainers_;
};

ModelConfig classification_config(const ExperimentSettings& settings, const NodeClassificationData& data) {
  ModelConfig config = settings.model;
  config.input_dim = data.features.cols();
  config.output_dim = std::max<std::size_t>(data.num_classes(), 2);
  config.likelihood = LikelihoodKind::categorical;
  config.time_input = false;
  return config;
}

std::pair<double, double> mean_sd(const std::vector<double>& v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

}  // namespace

std::string_view to_string(Method method) {
  switch (method) {
    case Method::gcn:
      return "gcn";
    case Method::gnode:
      return "gnode";
    case Method::gnsde:
      return "gnsde";
    case Method::ensemble_gcn:
      return "ensemble_gcn";
    case Method::dropout_gcn:
      return "dropout_gcn";
    case Method::dropout_gnode:
      return "dropout_gnode";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  for (auto m : {Method::gcn, Method::gnode, Method::gnsde, Method::ensemble_gcn, Method::dropout_gcn,
                 Method::dropout_gnode}) {
    if (name == to_string(m)) return m;
  }
  throw InvalidArgument("unknown method '" + std::string(name) +
                        "' (expected gcn, gnode, gnsde, ensemble_gcn, dropout_gcn, dropout_gnode)");
}

std::string_view to_string(CurveKind kind) {
  switch (kind) {
    case CurveKind::train_fraction:
      return "train_fraction";
    case CurveKind::node_count:
      return "node_count";
    case CurveKind::entropy_threshold:
      return "entropy_threshold";
    case CurveKind::noise_loglik:
      return "noise_loglik";
  }
  return "?";
}

CurveKind parse_curve_kind(std::string_view name) {
  for (auto k : {CurveKind::train_fraction, CurveKind::node_count, CurveKind::entropy_threshold,
                 CurveKind::noise_loglik}) {
    if (name == to_string(k)) return k;
  }
  throw InvalidArgument("unknown curve '" + std::string(name) +
                        "' (expected train_fraction, node_count, entropy_threshold, noise_loglik)");
}

std::string_view to_string(Acquisition acquisition) {
  return acquisition == Acquisition::random ? "random" : "max_entropy";
}

Acquisition parse_acquisition(std::string_view name) {
  if (name == "random") return Acquisition::random;
  if (name == "max_entropy") return Acquisition::max_entropy;
  throw InvalidArgument("unknown acquisition '" + std::string(name) + "' (expected random, max_entropy)");
}

ExperimentSettings classification_defaults() {
  ExperimentSettings s;
  s.t1 = 1.0;
  s.solver_steps = 10;
  s.train.epochs = 60;
  return s;
}

ExperimentSettings regression_defaults() {
  ExperimentSettings s;
  s.model.likelihood = LikelihoodKind::gaussian;
  s.t1 = 12.0;
  s.solver_steps = 120;
  s.train.epochs = 500;
  return s;
}

std::vector<double> default_curve_values(CurveKind kind) {
  switch (kind) {
    case CurveKind::train_fraction:
      return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    case CurveKind::node_count:
      return {50, 100, 200, 300, 500};
    case CurveKind::entropy_threshold:
      return {std::numeric_limits<double>::infinity(), 1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1};
    case CurveKind::noise_loglik:
      return {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  }
  return {};
}

PredictiveSummary fit_predict_classification(Method method, const NodeClassificationData& data,
                                             const ExperimentSettings& settings, std::uint64_t seed) {
  const auto adj = normalize(data.graph);
  const auto grid = settings.grid();
  Predictor predictor(method, settings, classification_config(settings, data), seed);
  predictor.train(data.features, adj, class_targets(data, Split::train), grid, settings.train.epochs);
  return predictor.predict(data.features, adj, grid);
}

std::vector<CurvePoint> run_curve(const CurveSpec& spec, const ExperimentSettings& settings) {
  if (spec.methods.empty() || spec.values.empty() || spec.seeds.empty()) {
    throw InvalidArgument("a curve needs at least one method, sweep value and seed");
  }
  const bool threshold_curve = spec.kind == CurveKind::entropy_threshold;
  // Threshold curves share one trained model per (method, seed).
  const std::size_t xs = threshold_curve ? 1 : spec.values.size();
  const std::size_t cells = spec.methods.size() * xs * spec.seeds.size();

  struct CellResult {
    std::vector<std::optional<double>> metric;  // one per threshold, or a single value
    std::vector<double> coverage;
    bool diverged = false;
  };
  std::vector<CellResult> results(cells);

  parallel_for(cells, settings.workers, [&](std::size_t cell) {
    const std::size_t s = cell % spec.seeds.size();
    const std::size_t v = (cell / spec.seeds.size()) % xs;
    const std::size_t m = cell / (spec.seeds.size() * xs);
    const auto seed = spec.seeds[s];
    VotingConfig vc = spec.data;
    vc.seed = rng::derive_seed(seed, kDataStream);
    if (spec.kind == CurveKind::train_fraction) vc.train_frac = spec.values[v];
    if (spec.kind == CurveKind::node_count) vc.n = static_cast<std::size_t>(std::llround(spec.values[v]));
    auto data = gen_voting(vc);
    if (spec.kind == CurveKind::noise_loglik) {
      data = add_feature_noise(data, spec.values[v], rng::derive_seed(seed, kNoiseStream));
    }
    auto& out = results[cell];
    try {
      const auto summary = fit_predict_classification(spec.methods[m], data, settings, seed);
      const auto test = data.mask(Split::test);
      if (threshold_curve) {
        for (const auto& r : selective_accuracy(summary, data.labels, test, spec.values)) {
          out.metric.push_back(r.accuracy);
          out.coverage.push_back(r.coverage);
        }
      } else if (spec.kind == CurveKind::noise_loglik) {
        out.metric.push_back(mean_log_probability(summary, data.labels, test));
      } else {
        out.metric.push_back(accuracy(summary.predicted_classes(), data.labels, test));
      }
    } catch (const DivergenceError&) {
      out.diverged = true;
    }
  });

  std::vector<CurvePoint> points;
  for (std::size_t m = 0; m < spec.methods.size(); ++m) {
    for (std::size_t v = 0; v < spec.values.size(); ++v) {
      CurvePoint p;
      p.method = spec.methods[m];
      p.x = spec.values[v];
      std::vector<double> values, coverage;
      for (std::size_t s = 0; s < spec.seeds.size(); ++s) {
        const auto& r = results[(m * xs + (threshold_curve ? 0 : v)) * spec.seeds.size() + s];
        if (r.diverged) {
          ++p.diverged;
          continue;
        }
        const std::size_t k = threshold_curve ? v : 0;
        if (threshold_curve) coverage.push_back(r.coverage[k]);
        if (r.metric[k]) values.push_back(*r.metric[k]);
      }
      p.seeds_used = values.size();
      if (!values.empty()) {
        const auto [mean, sd] = mean_sd(values);
        p.mean = mean;
        p.sd = sd;
      }
      if (!coverage.empty()) p.coverage = mean_sd(coverage).first;
      points.push_back(p);
    }
  }
  return points;
}

std::size_t max_entropy_pick(std::span<const double> entropy, std::span<const std::uint8_t> labeled) {
  if (entropy.size() != labeled.size()) throw DimensionError("entropy and labeled mask lengths differ");
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < entropy.size(); ++i) {
    if (labeled[i]) continue;
    if (!best || entropy[i] > entropy[*best]) best = i;
  }
  if (!best) throw InvalidArgument("every node is already labeled");
  return *best;
}

std::vector<ActiveRound> active_learning(Method method, const NodeClassificationData& data,
                                         const ExperimentSettings& settings, const ActiveLearningConfig& config) {
  const std::size_t n = data.num_nodes();
  if (config.start < 1 || config.start > config.end || config.end > n) {
    throw InvalidArgument("active learning needs 1 <= start <= end <= " + std::to_string(n));
  }
  const auto adj = normalize(data.graph);
  const auto grid = settings.grid();
  Predictor predictor(method, settings, classification_config(settings, data), config.seed);

  std::vector<std::uint8_t> labeled(n, 0);
  const auto order = shuffled_indices(n, rng::derive_seed(config.seed, kDataStream), 0);
  for (std::size_t k = 0; k < config.start; ++k) labeled[order[k]] = 1;
  const std::vector<std::uint8_t> everyone(n, 1);

  std::vector<ActiveRound> trace;
  for (std::size_t size = config.start;; ++size) {
    predictor.train(data.features, adj, ClassTargets{data.labels, labeled}, grid, config.epochs_per_round);
    const auto summary = predictor.predict(data.features, adj, grid);
    ActiveRound round;
    round.labeled = size;
    round.accuracy = accuracy(summary.predicted_classes(), data.labels, everyone);
    if (size == config.end) {
      trace.push_back(round);
      break;
    }
    std::size_t pick = 0;
    if (config.acquisition == Acquisition::max_entropy) {
      pick = max_entropy_pick(summary.entropy.data(), labeled);
    } else {
      std::vector<std::size_t> pool;
      for (std::size_t i = 0; i < n; ++i) {
        if (!labeled[i]) pool.push_back(i);
      }
      const double u = rng::uniform(rng::derive_seed(config.seed, kPickStream), 0, size);
      pick = pool[std::min(pool.size() - 1, static_cast<std::size_t>(u * static_cast<double>(pool.size())))];
    }
    labeled[pick] = 1;
    round.chosen = pick;
    trace.push_back(round);
  }
  return trace;
}

RegressionRun run_regression(Method method, const TemporalRegressionData& data, const ExperimentSettings& settings,
                             std::span<const double> thresholds, std::uint64_t seed) {
  const auto adj = normalize(data.graph);
  const auto grid = settings.grid();
  ModelConfig config = settings.model;
  config.input_dim = data.features.cols();
  config.output_dim = 1;
  config.likelihood = LikelihoodKind::gaussian;
  config.time_input = kind_of(method) == ModelKind::gcn;
  Predictor predictor(method, settings, config, seed);
  const auto train_targets = regression_targets(data, grid, false);
  const auto test_targets = regression_targets(data, grid, true);
  predictor.train(data.features, adj, train_targets, grid, settings.train.epochs);

  const auto test = predictor.predict_points(data.features, adj, grid, test_targets.points);
  std::vector<double> y;
  for (const auto& p : test_targets.points) y.push_back(p.value);

  RegressionRun run;
  run.method = method;
  run.seed = seed;
  run.rows = variance_threshold_eval(test, y, thresholds);

  auto mean_of = [](std::span<const double> v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };
  const auto train = predictor.predict_points(data.features, adj, grid, train_targets.points);
  run.variance_train = mean_of(train.variance.data());
  std::vector<double> interp, extrap;
  auto test_var = test.variance.data();
  for (std::size_t i = 0; i < test_targets.points.size(); ++i) {
    (grid.time(test_targets.points[i].grid_index) >= 10.0 ? extrap : interp).push_back(test_var[i]);
  }
  run.variance_interpolation = mean_of(interp);
  run.variance_extrapolation = mean_of(extrap);
  return run;
}

std::vector<RegressionRun> run_regression_table(const RegressionSpec& spec, const ExperimentSettings& settings) {
  if (spec.methods.empty() || spec.seeds.empty()) throw InvalidArgument("a table needs methods and seeds");
  const std::size_t cells = spec.methods.size() * spec.seeds.size();
  std::vector<RegressionRun> runs(cells);
  parallel_for(cells, settings.workers, [&](std::size_t cell) {
    const auto seed = spec.seeds[cell % spec.seeds.size()];
    const auto data = gen_three_node(spec.n_obs, rng::derive_seed(seed, kDataStream), spec.noise_sd);
    runs[cell] = run_regression(spec.methods[cell / spec.seeds.size()], data, settings, spec.thresholds, seed);
  });
  return runs;
}

}  // namespace gnsde
