#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "gnsde/latent.hpp"
#include "gnsde/model.hpp"
#include "gnsde/summary.hpp"

namespace gnsde {

/// Two-layer GCN: encoder followed by the output head. With `time_input`
/// the readout time is appended to the features as an extra column.
class GcnModel final : public NodeModel {
 public:
  explicit GcnModel(ModelConfig config);

  ForwardPass forward(const Tensor& x, const NormalizedAdjacency& adj, const TimeGrid& grid,
                      std::span<const std::size_t> readout, const SampleSpec& spec) const override;
};

/// Graph neural ODE: Euler integration of the drift from the encoded state.
class GnOdeModel final : public NodeModel {
 public:
  explicit GnOdeModel(ModelConfig config);

  ForwardPass forward(const Tensor& x, const NormalizedAdjacency& adj, const TimeGrid& grid,
                      std::span<const std::size_t> readout, const SampleSpec& spec) const override;
};

/// MC dropout: N passes with dropout active at prediction. `rate` must lie in (0, 1).
PredictiveSummary mc_dropout_predict(const NodeModel& model, const Tensor& x, const NormalizedAdjacency& adj,
                                     const TimeGrid& grid, double rate, std::size_t num_samples,
                                     std::uint64_t base_seed, std::size_t workers = 1);

/// Same, at (grid_index, node) points.
PredictiveSummary mc_dropout_predict_points(const NodeModel& model, const Tensor& x,
                                            const NormalizedAdjacency& adj, const TimeGrid& grid,
                                            std::span<const GridObservation> points, double rate,
                                            std::size_t num_samples, std::uint64_t base_seed,
                                            std::size_t workers = 1);

/// Deep ensemble of independently initialized members.
class Ensemble {
 public:
  /// Members use init seeds derived from `config.init_seed`. Throws
  /// InvalidArgument when `members` < 2.
  Ensemble(const ModelConfig& config, std::size_t members = 5);

  std::size_t size() const noexcept { return members_.size(); }
  NodeModel& member(std::size_t i) { return *members_.at(i); }
  const NodeModel& member(std::size_t i) const { return *members_.at(i); }

  /// One deterministic pass per member at the final grid point. Categorical
  /// members contribute probabilities; the summary averages them.
  PredictiveSummary predict(const Tensor& x, const NormalizedAdjacency& adj, const TimeGrid& grid) const;
  PredictiveSummary predict_points(const Tensor& x, const NormalizedAdjacency& adj, const TimeGrid& grid,
                                   std::span<const GridObservation> points) const;

 private:
  std::vector<std::unique_ptr<NodeModel>> members_;
};

}  // namespace gnsde
