#pragma once

#include <cstddef>
#include <vector>

#include "gnsde/parameters.hpp"

namespace gnsde {

struct AdamConfig {
  double lr = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam with bias correction. Moment buffers live as long as the optimizer,
/// so repeated step() calls continue one trajectory.
class Adam {
 public:
  Adam(ParameterList& params, AdamConfig config = {});

  /// Applies one update from the accumulated grads. Parameters that received
  /// no gradient are treated as having a zero gradient; if none did, throws
  /// InvalidArgument.
  void step();
  void zero_grad() { params_.zero_grad(); }

  std::size_t steps_taken() const noexcept { return t_; }
  const AdamConfig& config() const noexcept { return config_; }

 private:
  ParameterList& params_;
  AdamConfig config_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  std::size_t t_ = 0;
};

}  // namespace gnsde
