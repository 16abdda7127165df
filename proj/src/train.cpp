#include "gnsde/train.hpp"

#include <cmath>
#include <string>

#include "gnsde/error.hpp"
#include "gnsde/rng.hpp"

namespace gnsde {

Trainer::Trainer(NodeModel& model, TrainConfig config)
    : model_(model), config_(config), adam_(model.parameters(), config.adam) {}

std::vector<EpochRecord> Trainer::run(const Tensor& x, const NormalizedAdjacency& adj, const Targets& targets,
                                      const TimeGrid& grid, std::size_t epochs) {
  std::vector<EpochRecord> trace;
  trace.reserve(epochs);
  for (std::size_t e = 0; e < epochs; ++e, ++epoch_) {
    SampleSpec spec;
    spec.seed = rng::derive_seed(config_.seed, epoch_);
    spec.dropout = model_.config().dropout;
    ObjectiveResult obj;
    try {
      adam_.zero_grad();
      obj = training_objective(model_, x, adj, targets, grid, spec);
      if (!std::isfinite(obj.loss.item())) throw NonFiniteError("loss is not finite");
      backward(obj.loss);
    } catch (const NonFiniteError& err) {
      throw DivergenceError(epoch_, err.what());
    } catch (const IntegrationError& err) {
      throw DivergenceError(epoch_, err.what());
    }
    adam_.step();
    trace.push_back({epoch_, obj.loss.item(), obj.nll, obj.kl});
  }
  return trace;
}

std::vector<EpochRecord> train(NodeModel& model, const Tensor& x, const NormalizedAdjacency& adj,
                               const Targets& targets, const TimeGrid& grid, const TrainConfig& config) {
  Trainer trainer(model, config);
  return trainer.run(x, adj, targets, grid);
}

}  // namespace gnsde
