#include "gnsde/sde.hpp"

#include <cmath>
#include <string>

#include "gnsde/error.hpp"
#include "gnsde/ops.hpp"
#include "gnsde/rng.hpp"

namespace gnsde {

namespace {

void check_field(const Tensor& value, const Tensor& z, const char* what) {
  if (value.shape() != z.shape()) {
    throw DimensionError(std::string(what) + " shape " + to_string(value.shape()) + " differs from state " +
                         to_string(z.shape()));
  }
}

void check_diffusion(const Tensor& g, const Tensor& z) {
  if (g.numel() != 1) check_field(g, z, "diffusion");
}

Tensor kl_integrand(const Tensor& f_post, const Tensor& f_prior, const Tensor& g, double dt) {
  for (double v : g.data()) {
    if (v == 0.0) throw SingularDiffusionError("diffusion is zero; drift residual is undefined");
  }
  auto u = div(sub(f_post, f_prior), g);
  return scale(sum(square(u)), 0.5 * dt);
}

}  // namespace

TimeGrid::TimeGrid(double t0, double t1, std::size_t steps) : t0_(t0), t1_(t1), steps_(steps) {
  if (!(t1 > t0)) throw InvalidArgument("time grid needs t1 > t0");
  if (steps == 0) throw InvalidArgument("time grid needs at least one step");
}

std::size_t TimeGrid::nearest_index(double t) const noexcept {
  const double pos = std::round((t - t0_) / dt());
  if (pos <= 0.0) return 0;
  if (pos >= static_cast<double>(steps_)) return steps_;
  return static_cast<std::size_t>(pos);
}

BrownianPath::BrownianPath(const TimeGrid& grid, Shape shape, std::uint64_t seed)
    : grid_(grid), shape_(std::move(shape)), seed_(seed) {
  const std::size_t width = numel(shape_);
  const std::size_t steps = grid.steps();
  const double sd = std::sqrt(grid.dt());
  std::vector<double> inc(steps * width);
  for (std::size_t j = 0; j < steps; ++j) {
    for (std::size_t c = 0; c < width; ++c) inc[j * width + c] = sd * rng::normal(seed, j, c);
  }
  increments_ = Tensor({steps, width}, std::move(inc));
}

Tensor BrownianPath::increment(std::size_t step) const {
  const std::size_t width = numel(shape_);
  auto all = increments_.data();
  return Tensor(shape_, std::vector<double>(all.begin() + step * width, all.begin() + (step + 1) * width));
}

Tensor BrownianPath::value_at(std::size_t j) const {
  const std::size_t width = numel(shape_);
  std::vector<double> w(width, 0.0);
  auto all = increments_.data();
  for (std::size_t s = 0; s < j; ++s) {
    for (std::size_t c = 0; c < width; ++c) w[c] += all[s * width + c];
  }
  return Tensor(shape_, std::move(w));
}

BrownianPath sample_brownian(const TimeGrid& grid, const Shape& shape, std::uint64_t seed) {
  return BrownianPath(grid, shape, seed);
}

Tensor em_step(const Tensor& z, double t, const VectorField& drift, const VectorField& diffusion, const Tensor& dW,
               double dt, std::size_t step) {
  try {
    auto f = drift(z, t);
    check_field(f, z, "drift");
    auto g = diffusion(z, t);
    check_diffusion(g, z);
    check_field(dW, z, "Brownian increment");
    return add(add(z, scale(f, dt)), mul(g, dW));
  } catch (const NonFiniteError& e) {
    throw IntegrationError(step, e.what());
  }
}

SolvedPath integrate_sde(const Tensor& z0, const TimeGrid& grid, const VectorField& drift,
                         const VectorField& diffusion, const BrownianPath& path) {
  if (!(path.grid() == grid)) throw InvalidArgument("Brownian path was sampled on a different grid");
  SolvedPath out{{z0}, grid};
  out.states.reserve(grid.steps() + 1);
  for (std::size_t j = 0; j < grid.steps(); ++j) {
    out.states.push_back(em_step(out.states.back(), grid.time(j), drift, diffusion, path.increment(j), grid.dt(), j));
  }
  return out;
}

SolvedPath integrate_ode(const Tensor& z0, const TimeGrid& grid, const VectorField& drift) {
  SolvedPath out{{z0}, grid};
  out.states.reserve(grid.steps() + 1);
  for (std::size_t j = 0; j < grid.steps(); ++j) {
    const auto& z = out.states.back();
    try {
      auto f = drift(z, grid.time(j));
      check_field(f, z, "drift");
      out.states.push_back(add(z, scale(f, grid.dt())));
    } catch (const NonFiniteError& e) {
      throw IntegrationError(j, e.what());
    }
  }
  return out;
}

Tensor kl_path_integral(const SolvedPath& path, const VectorField& posterior_drift, const VectorField& prior_drift,
                        const VectorField& diffusion) {
  const auto& grid = path.grid;
  Tensor total = Tensor::scalar(0.0);
  for (std::size_t j = 0; j < grid.steps(); ++j) {
    const auto& z = path.states[j];
    const double t = grid.time(j);
    total = add(total, kl_integrand(posterior_drift(z, t), prior_drift(z, t), diffusion(z, t), grid.dt()));
  }
  return total;
}

PathWithKl integrate_sde_with_kl(const Tensor& z0, const TimeGrid& grid, const VectorField& posterior_drift,
                                 const VectorField& prior_drift, const VectorField& diffusion,
                                 const BrownianPath& path) {
  if (!(path.grid() == grid)) throw InvalidArgument("Brownian path was sampled on a different grid");
  PathWithKl out{SolvedPath{{z0}, grid}, Tensor::scalar(0.0)};
  auto& states = out.path.states;
  states.reserve(grid.steps() + 1);
  const double dt = grid.dt();
  for (std::size_t j = 0; j < grid.steps(); ++j) {
    const auto& z = states.back();
    const double t = grid.time(j);
    try {
      auto f = posterior_drift(z, t);
      check_field(f, z, "drift");
      auto g = diffusion(z, t);
      check_diffusion(g, z);
      out.kl = add(out.kl, kl_integrand(f, prior_drift(z, t), g, dt));
      states.push_back(add(add(z, scale(f, dt)), mul(g, path.increment(j))));
    } catch (const NonFiniteError& e) {
      throw IntegrationError(j, e.what());
    }
  }
  return out;
}

}  // namespace gnsde
