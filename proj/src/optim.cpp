#include "gnsde/optim.hpp"

#include <cmath>

#include "gnsde/error.hpp"

namespace gnsde {

Adam::Adam(ParameterList& params, AdamConfig config) : params_(params), config_(config) {
  for (const auto& p : params_) {
    m_.emplace_back(p.value.numel(), 0.0);
    v_.emplace_back(p.value.numel(), 0.0);
  }
}

void Adam::step() {
  bool any = false;
  for (const auto& p : params_) any = any || p.value.has_grad();
  if (!any) throw InvalidArgument("Adam::step called before any gradient was computed");
  ++t_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  std::size_t k = 0;
  for (auto& p : params_) {
    auto& m = m_[k];
    auto& v = v_[k];
    ++k;
    const auto g = p.value.grad();
    auto w = p.value.mutable_data();
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g[i];
      v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g[i] * g[i];
      const double mhat = m[i] / c1;
      const double vhat = v[i] / c2;
      w[i] -= config_.lr * mhat / (std::sqrt(vhat) + config_.eps);
    }
  }
}

}  // namespace gnsde
