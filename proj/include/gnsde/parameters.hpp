#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "gnsde/tensor.hpp"

namespace gnsde {

struct NamedParameter {
  std::string name;
  Tensor value;
};

/// Ordered, named trainable tensors. Order is stable and defines checkpoint
/// layout and optimizer state layout.
class ParameterList {
 public:
  Tensor& add(std::string name, Tensor value);
  /// Throws InvalidArgument when `name` is unknown.
  Tensor& get(const std::string& name);
  const Tensor& get(const std::string& name) const;
  bool contains(const std::string& name) const;

  std::size_t size() const noexcept { return items_.size(); }
  std::size_t total_elements() const;
  auto begin() { return items_.begin(); }
  auto end() { return items_.end(); }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

  void zero_grad();

 private:
  std::vector<NamedParameter> items_;
};

/// Weight [in x out] drawn Glorot-uniform, bias [out] zero.
struct Dense {
  Tensor weight;
  Tensor bias;
};

Dense glorot_dense(std::size_t in, std::size_t out, std::mt19937_64& rng);

}  // namespace gnsde
