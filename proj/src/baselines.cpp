#include "gnsde/baselines.hpp"

#include <algorithm>

#include "gnsde/error.hpp"
#include "gnsde/ops.hpp"
#include "gnsde/rng.hpp"

namespace gnsde {

namespace {

ModelConfig with_kind(ModelConfig config, ModelKind kind) {
  config.kind = kind;
  return config;
}

void check_rate(double rate) {
  if (!(rate > 0.0 && rate < 1.0)) throw InvalidArgument("MC dropout rate must lie in (0, 1)");
}

}  // namespace

GcnModel::GcnModel(ModelConfig config) : NodeModel(with_kind(std::move(config), ModelKind::gcn)) {}

ForwardPass GcnModel::forward(const Tensor& x, const NormalizedAdjacency& adj, const TimeGrid& grid,
                              std::span<const std::size_t> readout, const SampleSpec& spec) const {
  check_inputs(x, adj);
  ForwardPass out;
  out.outputs.reserve(readout.size());
  if (!config_.time_input) {
    auto head = project(encode(x, adj, spec), adj);
    out.outputs.assign(readout.size(), head);
    return out;
  }
  for (auto j : readout) {
    out.outputs.push_back(project(encode(append_constant_col(x, grid.time(j)), adj, spec), adj));
  }
  return out;
}

GnOdeModel::GnOdeModel(ModelConfig config) : NodeModel(with_kind(std::move(config), ModelKind::gnode)) {}

ForwardPass GnOdeModel::forward(const Tensor& x, const NormalizedAdjacency& adj, const TimeGrid& grid,
                                std::span<const std::size_t> readout, const SampleSpec& spec) const {
  check_inputs(x, adj);
  auto z0 = encode(x, adj, spec);
  VectorField f = [&](const Tensor& z, double t) { return drift(z, t, adj, spec); };
  auto path = integrate_ode(z0, grid, f);
  ForwardPass out;
  out.outputs.reserve(readout.size());
  for (auto j : readout) out.outputs.push_back(project(path.states.at(j), adj));
  return out;
}

PredictiveSummary mc_dropout_predict(const NodeModel& model, const Tensor& x, const NormalizedAdjacency& adj,
                                     const TimeGrid& grid, double rate, std::size_t num_samples,
                                     std::uint64_t base_seed, std::size_t workers) {
  check_rate(rate);
  const std::size_t last = grid.steps();
  auto passes =
      detail::monte_carlo_passes(model, x, adj, grid, std::span(&last, 1), num_samples, base_seed, rate, workers);
  std::vector<Tensor> samples;
  samples.reserve(passes.size());
  for (auto& p : passes) samples.push_back(std::move(p.front()));
  return summarize(std::move(samples), model.config().likelihood == LikelihoodKind::categorical);
}

PredictiveSummary mc_dropout_predict_points(const NodeModel& model, const Tensor& x,
                                            const NormalizedAdjacency& adj, const TimeGrid& grid,
                                            std::span<const GridObservation> points, double rate,
                                            std::size_t num_samples, std::uint64_t base_seed,
                                            std::size_t workers) {
  check_rate(rate);
  return mc_predict_points(model, x, adj, grid, points, num_samples, base_seed, rate, workers);
}

Ensemble::Ensemble(const ModelConfig& config, std::size_t members) {
  if (members < 2) throw InvalidArgument("an ensemble needs at least 2 members");
  members_.reserve(members);
  for (std::size_t k = 0; k < members; ++k) {
    auto member_config = config;
    member_config.init_seed = rng::derive_seed(config.init_seed, 0xe5e0 + k);
    members_.push_back(make_model(member_config));
  }
}

PredictiveSummary Ensemble::predict(const Tensor& x, const NormalizedAdjacency& adj, const TimeGrid& grid) const {
  const std::size_t last = grid.steps();
  std::vector<Tensor> samples;
  samples.reserve(members_.size());
  for (const auto& m : members_) {
    // Stochastic members contribute one pass on their own path seed.
    auto pass = detail::monte_carlo_passes(*m, x, adj, grid, std::span(&last, 1), 1, m->config().init_seed, 0.0, 1);
    samples.push_back(std::move(pass.front().front()));
  }
  return summarize(std::move(samples), members_.front()->config().likelihood == LikelihoodKind::categorical);
}

PredictiveSummary Ensemble::predict_points(const Tensor& x, const NormalizedAdjacency& adj, const TimeGrid& grid,
                                           std::span<const GridObservation> points) const {
  if (points.empty()) throw InvalidArgument("no prediction points");
  std::vector<std::size_t> readout;
  for (const auto& p : points) readout.push_back(p.grid_index);
  std::sort(readout.begin(), readout.end());
  readout.erase(std::unique(readout.begin(), readout.end()), readout.end());
  std::vector<Tensor> samples;
  samples.reserve(members_.size());
  for (const auto& m : members_) {
    auto pass = detail::monte_carlo_passes(*m, x, adj, grid, readout, 1, m->config().init_seed, 0.0, 1);
    samples.push_back(std::move(detail::select_points(pass, readout, points).front()));
  }
  return summarize(std::move(samples), members_.front()->config().likelihood == LikelihoodKind::categorical);
}

}  // namespace gnsde
