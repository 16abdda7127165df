#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "gnsde/tensor.hpp"

namespace gnsde {

/// Uniform grid t_j = t0 + j * dt, j = 0..steps.
class TimeGrid {
 public:
  TimeGrid(double t0, double t1, std::size_t steps);

  double t0() const noexcept { return t0_; }
  double t1() const noexcept { return t1_; }
  std::size_t steps() const noexcept { return steps_; }
  double dt() const noexcept { return (t1_ - t0_) / static_cast<double>(steps_); }
  double time(std::size_t j) const noexcept { return t0_ + static_cast<double>(j) * dt(); }
  /// Grid index closest to t, clamped to [0, steps].
  std::size_t nearest_index(double t) const noexcept;

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  double t0_;
  double t1_;
  std::size_t steps_;
};

/// Drift or diffusion evaluated at (state, time). A diffusion may return a
/// single-element tensor, applied to every coordinate.
using VectorField = std::function<Tensor(const Tensor& z, double t)>;

/// Gaussian increments dW_j ~ N(0, dt) per coordinate, keyed on
/// (seed, step, coordinate).
class BrownianPath {
 public:
  BrownianPath(const TimeGrid& grid, Shape shape, std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }
  const TimeGrid& grid() const noexcept { return grid_; }
  const Shape& shape() const noexcept { return shape_; }
  /// All increments, [steps x numel(shape)].
  const Tensor& increments() const noexcept { return increments_; }
  /// dW over [t_j, t_{j+1}], shaped like the state.
  Tensor increment(std::size_t step) const;
  /// W(t_j) with W(t_0) = 0.
  Tensor value_at(std::size_t j) const;

 private:
  TimeGrid grid_;
  Shape shape_;
  std::uint64_t seed_;
  Tensor increments_;
};

BrownianPath sample_brownian(const TimeGrid& grid, const Shape& shape, std::uint64_t seed);

struct SolvedPath {
  std::vector<Tensor> states;  // states[j] = z(t_j), j = 0..steps
  TimeGrid grid;

  const Tensor& terminal() const { return states.back(); }
};

/// z + f(z, t) dt + g(z, t) * dW with coordinatewise noise. A non-finite
/// result raises IntegrationError carrying `step`.
Tensor em_step(const Tensor& z, double t, const VectorField& drift, const VectorField& diffusion, const Tensor& dW,
               double dt, std::size_t step = 0);

/// Euler-Maruyama over the path's grid. Differentiable through the drift.
SolvedPath integrate_sde(const Tensor& z0, const TimeGrid& grid, const VectorField& drift,
                         const VectorField& diffusion, const BrownianPath& path);

/// Explicit Euler: z_{j+1} = z_j + dt f(z_j, t_j).
SolvedPath integrate_ode(const Tensor& z0, const TimeGrid& grid, const VectorField& drift);

/// Left-Riemann sum of 1/2 ||(f_post - f_prior) / g||^2 dt along the path.
/// Throws SingularDiffusionError if g is zero anywhere on the path.
Tensor kl_path_integral(const SolvedPath& path, const VectorField& posterior_drift, const VectorField& prior_drift,
                        const VectorField& diffusion);

struct PathWithKl {
  SolvedPath path;
  Tensor kl;
};

/// Integrates the posterior SDE and accumulates the KL integrand from the
/// same drift evaluations used by each Euler-Maruyama step.
PathWithKl integrate_sde_with_kl(const Tensor& z0, const TimeGrid& grid, const VectorField& posterior_drift,
                                 const VectorField& prior_drift, const VectorField& diffusion,
                                 const BrownianPath& path);

}  // namespace gnsde
