#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "gnsde/model.hpp"
#include "gnsde/summary.hpp"

namespace gnsde {

/// Node labels for static classification; likelihood at t1 only.
struct ClassTargets {
  std::vector<int> labels;
  std::vector<std::uint8_t> mask;
};

/// One scalar observation of `node` at solver grid point `grid_index`.
struct GridObservation {
  std::size_t grid_index = 0;
  std::size_t node = 0;
  double value = 0.0;
};

struct RegressionTargets {
  std::vector<GridObservation> points;
};

using Targets = std::variant<ClassTargets, RegressionTargets>;

/// Grid indices the likelihood needs, sorted and unique.
std::vector<std::size_t> readout_indices(const Targets& targets, const TimeGrid& grid);
std::size_t observation_count(const Targets& targets);

struct ObjectiveResult {
  /// nll + kl / observations: the negative ELBO per observed target.
  Tensor loss;
  /// Mean negative log-likelihood over observed targets.
  double nll = 0.0;
  /// KL path integral (0 for deterministic models).
  double kl = 0.0;
};

/// Negative log-likelihood of the targets given one forward pass' outputs
/// (mean over observations). Categorical: cross-entropy of softmax outputs.
/// Gaussian: 1/2 log(2 pi v) + (y - mu)^2 / (2 v) with v = obs_variance.
Tensor negative_log_likelihood(const NodeModel& model, const ForwardPass& pass,
                               std::span<const std::size_t> readout, const Targets& targets);

/// Training objective of any model for one stochastic pass. For GN-SDE the
/// KL term is included and `spec.with_kl` is forced on.
ObjectiveResult training_objective(const NodeModel& model, const Tensor& x, const NormalizedAdjacency& adj,
                                   const Targets& targets, const TimeGrid& grid, SampleSpec spec);

/// Latent graph neural SDE. Posterior: dz = drift(z, t, graph) dt + sigma dW.
/// Prior: dz = -prior_decay * z dt + sigma dW.
class LatentGnsde final : public NodeModel {
 public:
  explicit LatentGnsde(ModelConfig config);

  bool stochastic() const noexcept override { return true; }

  Tensor posterior_drift(const Tensor& z, double t, const NormalizedAdjacency& adj) const { return drift(z, t, adj); }
  Tensor prior_drift(const Tensor& z, double t) const;
  Tensor diffusion(const Tensor& z, double t) const;

  /// Integrates the posterior SDE from z(0) = encode(x) on a Brownian path
  /// seeded with `seed`.
  PathWithKl latent_path(const Tensor& x, const NormalizedAdjacency& adj, const TimeGrid& grid, std::uint64_t seed,
                         bool with_kl) const;

  ForwardPass forward(const Tensor& x, const NormalizedAdjacency& adj, const TimeGrid& grid,
                      std::span<const std::size_t> readout, const SampleSpec& spec) const override;
};

/// Single-path ELBO estimate on the Brownian path `seed`.
ObjectiveResult elbo(const LatentGnsde& model, const Tensor& x, const NormalizedAdjacency& adj,
                     const Targets& targets, const TimeGrid& grid, std::uint64_t seed);

namespace detail {
/// N likelihood-mapped passes (seeds base_seed + 1 .. base_seed + N), each a
/// list of [n x d] tensors aligned with `readout`.
std::vector<std::vector<Tensor>> monte_carlo_passes(const NodeModel& model, const Tensor& x,
                                                    const NormalizedAdjacency& adj, const TimeGrid& grid,
                                                    std::span<const std::size_t> readout, std::size_t num_samples,
                                                    std::uint64_t base_seed, double dropout, std::size_t workers);
/// Rows of each pass picked out at (grid_index, node) points, as [points x d].
std::vector<Tensor> select_points(const std::vector<std::vector<Tensor>>& passes,
                                  std::span<const std::size_t> readout, std::span<const GridObservation> points);
}  // namespace detail

/// Draws N passes with seeds base_seed + 1 .. base_seed + N, maps each through
/// the likelihood head and summarizes the outputs at the final grid point.
/// `workers` > 1 integrates paths concurrently; the result does not depend
/// on it. Throws InvalidArgument when num_samples < 1.
PredictiveSummary mc_predict(const NodeModel& model, const Tensor& x, const NormalizedAdjacency& adj,
                             const TimeGrid& grid, std::size_t num_samples, std::uint64_t base_seed,
                             std::size_t workers = 1);

/// As mc_predict, with one summary row per (grid_index, node) point.
PredictiveSummary mc_predict_points(const NodeModel& model, const Tensor& x, const NormalizedAdjacency& adj,
                                    const TimeGrid& grid, std::span<const GridObservation> points,
                                    std::size_t num_samples, std::uint64_t base_seed, double dropout = 0.0,
                                    std::size_t workers = 1);

}  // namespace gnsde
