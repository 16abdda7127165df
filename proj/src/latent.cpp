#include "gnsde/latent.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gnsde/error.hpp"
#include "gnsde/ops.hpp"
#include "gnsde/parallel.hpp"

namespace gnsde {

namespace {

const ClassTargets* as_class(const Targets& t) { return std::get_if<ClassTargets>(&t); }
const RegressionTargets* as_regression(const Targets& t) { return std::get_if<RegressionTargets>(&t); }

std::size_t position_of(std::span<const std::size_t> readout, std::size_t grid_index) {
  auto it = std::lower_bound(readout.begin(), readout.end(), grid_index);
  if (it == readout.end() || *it != grid_index) {
    throw InvalidArgument("grid index " + std::to_string(grid_index) + " was not read out");
  }
  return static_cast<std::size_t>(it - readout.begin());
}

}  // namespace

std::vector<std::size_t> readout_indices(const Targets& targets, const TimeGrid& grid) {
  if (as_class(targets)) return {grid.steps()};
  std::vector<std::size_t> idx;
  for (const auto& p : as_regression(targets)->points) {
    if (p.grid_index > grid.steps()) throw InvalidArgument("observation beyond the solver grid");
    idx.push_back(p.grid_index);
  }
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  return idx;
}

std::size_t observation_count(const Targets& targets) {
  if (const auto* c = as_class(targets)) {
    return static_cast<std::size_t>(std::count_if(c->mask.begin(), c->mask.end(), [](auto m) { return m != 0; }));
  }
  return as_regression(targets)->points.size();
}

Tensor negative_log_likelihood(const NodeModel& model, const ForwardPass& pass,
                               std::span<const std::size_t> readout, const Targets& targets) {
  const auto& cfg = model.config();
  if (const auto* c = as_class(targets)) {
    if (cfg.likelihood != LikelihoodKind::categorical) throw InvalidArgument("class targets need a categorical head");
    return cross_entropy(softmax_rows(pass.outputs.at(position_of(readout, readout.back()))), c->labels, c->mask);
  }
  if (cfg.likelihood != LikelihoodKind::gaussian) throw InvalidArgument("regression targets need a gaussian head");
  const auto& points = as_regression(targets)->points;
  if (points.empty()) throw InvalidArgument("no observations to fit");
  // Group observations by the readout they fall on.
  std::vector<std::vector<std::size_t>> flat(readout.size());
  std::vector<std::vector<double>> values(readout.size());
  const std::size_t d = cfg.output_dim;
  for (const auto& p : points) {
    const auto k = position_of(readout, p.grid_index);
    flat[k].push_back(p.node * d);
    values[k].push_back(p.value);
  }
  Tensor sq_err = Tensor::scalar(0.0);
  for (std::size_t k = 0; k < readout.size(); ++k) {
    if (flat[k].empty()) continue;
    auto mu = gather(pass.outputs[k], flat[k]);
    auto y = Tensor({values[k].size()}, values[k]);
    sq_err = add(sq_err, sum(square(sub(y, mu))));
  }
  const double v = cfg.obs_variance;
  const double n = static_cast<double>(points.size());
  return add_scalar(scale(sq_err, 1.0 / (2.0 * v * n)), 0.5 * std::log(2.0 * std::numbers::pi * v));
}

ObjectiveResult training_objective(const NodeModel& model, const Tensor& x, const NormalizedAdjacency& adj,
                                   const Targets& targets, const TimeGrid& grid, SampleSpec spec) {
  const auto n_obs = observation_count(targets);
  if (n_obs == 0) throw InvalidArgument("training targets select no observations");
  spec.with_kl = model.stochastic();
  const auto readout = readout_indices(targets, grid);
  auto pass = model.forward(x, adj, grid, readout, spec);
  auto nll = negative_log_likelihood(model, pass, readout, targets);
  ObjectiveResult out;
  out.nll = nll.item();
  if (pass.kl.defined()) {
    out.kl = pass.kl.item();
    out.loss = add(nll, scale(pass.kl, 1.0 / static_cast<double>(n_obs)));
  } else {
    out.loss = nll;
  }
  return out;
}

LatentGnsde::LatentGnsde(ModelConfig config) : NodeModel([&] {
  config.kind = ModelKind::gnsde;
  return std::move(config);
}()) {}

Tensor LatentGnsde::prior_drift(const Tensor& z, double /*t*/) const {
  if (config_.prior_decay == 0.0) return Tensor::zeros(z.shape());
  return scale(z, -config_.prior_decay);
}

Tensor LatentGnsde::diffusion(const Tensor& /*z*/, double /*t*/) const { return Tensor::scalar(config_.diffusion); }

PathWithKl LatentGnsde::latent_path(const Tensor& x, const NormalizedAdjacency& adj, const TimeGrid& grid,
                                    std::uint64_t seed, bool with_kl) const {
  check_inputs(x, adj);
  auto z0 = encode(x, adj);
  auto path = sample_brownian(grid, z0.shape(), seed);
  VectorField post = [&](const Tensor& z, double t) { return drift(z, t, adj); };
  VectorField prior = [&](const Tensor& z, double t) { return prior_drift(z, t); };
  VectorField diff = [&](const Tensor& z, double t) { return diffusion(z, t); };
  if (with_kl) return integrate_sde_with_kl(z0, grid, post, prior, diff, path);
  return {integrate_sde(z0, grid, post, diff, path), Tensor()};
}

ForwardPass LatentGnsde::forward(const Tensor& x, const NormalizedAdjacency& adj, const TimeGrid& grid,
                                 std::span<const std::size_t> readout, const SampleSpec& spec) const {
  auto latent = latent_path(x, adj, grid, spec.seed, spec.with_kl);
  ForwardPass out;
  out.outputs.reserve(readout.size());
  for (auto j : readout) out.outputs.push_back(project(latent.path.states.at(j), adj));
  out.kl = latent.kl;
  return out;
}

ObjectiveResult elbo(const LatentGnsde& model, const Tensor& x, const NormalizedAdjacency& adj,
                     const Targets& targets, const TimeGrid& grid, std::uint64_t seed) {
  SampleSpec spec;
  spec.seed = seed;
  return training_objective(model, x, adj, targets, grid, spec);
}

namespace detail {

std::vector<std::vector<Tensor>> monte_carlo_passes(const NodeModel& model, const Tensor& x,
                                                    const NormalizedAdjacency& adj, const TimeGrid& grid,
                                                    std::span<const std::size_t> readout, std::size_t num_samples,
                                                    std::uint64_t base_seed, double dropout, std::size_t workers) {
  if (num_samples < 1) throw InvalidArgument("Monte-Carlo prediction needs at least one sample");
  std::vector<std::vector<Tensor>> passes(num_samples);
  parallel_for(num_samples, workers, [&](std::size_t i) {
    NoGradGuard no_grad;
    SampleSpec spec;
    spec.seed = base_seed + 1 + i;
    spec.dropout = dropout;
    auto pass = model.forward(x, adj, grid, readout, spec);
    for (auto& out : pass.outputs) passes[i].push_back(model.likelihood_map(out));
  });
  return passes;
}

std::vector<Tensor> select_points(const std::vector<std::vector<Tensor>>& passes,
                                  std::span<const std::size_t> readout, std::span<const GridObservation> points) {
  std::vector<Tensor> out;
  out.reserve(passes.size());
  for (const auto& pass : passes) {
    const std::size_t d = pass.front().cols();
    std::vector<double> rows;
    rows.reserve(points.size() * d);
    for (const auto& p : points) {
      const auto& t = pass[position_of(readout, p.grid_index)];
      if (p.node >= t.rows()) throw InvalidArgument("observation node outside the graph");
      auto data = t.data();
      rows.insert(rows.end(), data.begin() + p.node * d, data.begin() + (p.node + 1) * d);
    }
    out.emplace_back(Shape{points.size(), d}, std::move(rows));
  }
  return out;
}

}  // namespace detail

PredictiveSummary mc_predict(const NodeModel& model, const Tensor& x, const NormalizedAdjacency& adj,
                             const TimeGrid& grid, std::size_t num_samples, std::uint64_t base_seed,
                             std::size_t workers) {
  const std::size_t last = grid.steps();
  auto passes = detail::monte_carlo_passes(model, x, adj, grid, std::span(&last, 1), num_samples, base_seed, 0.0,
                                           workers);
  std::vector<Tensor> samples;
  samples.reserve(passes.size());
  for (auto& p : passes) samples.push_back(std::move(p.front()));
  return summarize(std::move(samples), model.config().likelihood == LikelihoodKind::categorical);
}

PredictiveSummary mc_predict_points(const NodeModel& model, const Tensor& x, const NormalizedAdjacency& adj,
                                    const TimeGrid& grid, std::span<const GridObservation> points,
                                    std::size_t num_samples, std::uint64_t base_seed, double dropout,
                                    std::size_t workers) {
  if (points.empty()) throw InvalidArgument("no prediction points");
  std::vector<std::size_t> readout;
  for (const auto& p : points) readout.push_back(p.grid_index);
  std::sort(readout.begin(), readout.end());
  readout.erase(std::unique(readout.begin(), readout.end()), readout.end());
  auto passes =
      detail::monte_carlo_passes(model, x, adj, grid, readout, num_samples, base_seed, dropout, workers);
  return summarize(detail::select_points(passes, readout, points),
                   model.config().likelihood == LikelihoodKind::categorical);
}

}  // namespace gnsde
