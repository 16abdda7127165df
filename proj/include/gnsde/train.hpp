#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gnsde/latent.hpp"
#include "gnsde/optim.hpp"

namespace gnsde {

struct TrainConfig {
  std::size_t epochs = 100;
  AdamConfig adam;
  std::uint64_t seed = 0;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double loss = 0.0;
  double nll = 0.0;
  double kl = 0.0;
};

/// Full-batch trainer. The optimizer and epoch counter persist across calls
/// to run(), so training can resume after the targets change.
class Trainer {
 public:
  Trainer(NodeModel& model, TrainConfig config);

  /// Runs `epochs` full-batch steps. Each epoch draws a fresh Brownian path
  /// and dropout masks from the master seed and the global epoch index.
  /// A non-finite loss throws DivergenceError with that index.
  std::vector<EpochRecord> run(const Tensor& x, const NormalizedAdjacency& adj, const Targets& targets,
                               const TimeGrid& grid, std::size_t epochs);
  std::vector<EpochRecord> run(const Tensor& x, const NormalizedAdjacency& adj, const Targets& targets,
                               const TimeGrid& grid) {
    return run(x, adj, targets, grid, config_.epochs);
  }

  std::size_t epochs_done() const noexcept { return epoch_; }

 private:
  NodeModel& model_;
  TrainConfig config_;
  Adam adam_;
  std::size_t epoch_ = 0;
};

/// Convenience wrapper: a fresh Trainer run for `config.epochs` epochs.
std::vector<EpochRecord> train(NodeModel& model, const Tensor& x, const NormalizedAdjacency& adj,
                               const Targets& targets, const TimeGrid& grid, const TrainConfig& config);

}  // namespace gnsde
