#include "gnsde/parameters.hpp"

#include <cmath>

#include "gnsde/error.hpp"

namespace gnsde {

Tensor& ParameterList::add(std::string name, Tensor value) {
  if (contains(name)) throw InvalidArgument("duplicate parameter name '" + name + "'");
  value.set_requires_grad(true);
  items_.push_back({std::move(name), std::move(value)});
  return items_.back().value;
}

Tensor& ParameterList::get(const std::string& name) {
  for (auto& p : items_) {
    if (p.name == name) return p.value;
  }
  throw InvalidArgument("unknown parameter '" + name + "'");
}

const Tensor& ParameterList::get(const std::string& name) const {
  return const_cast<ParameterList*>(this)->get(name);
}

bool ParameterList::contains(const std::string& name) const {
  for (const auto& p : items_) {
    if (p.name == name) return true;
  }
  return false;
}

std::size_t ParameterList::total_elements() const {
  std::size_t n = 0;
  for (const auto& p : items_) n += p.value.numel();
  return n;
}

void ParameterList::zero_grad() {
  for (auto& p : items_) p.value.zero_grad();
}

Dense glorot_dense(std::size_t in, std::size_t out, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  std::vector<double> w(in * out);
  for (auto& v : w) v = dist(rng);
  return {Tensor({in, out}, std::move(w), true), Tensor::zeros({out}, true)};
}

}  // namespace gnsde
