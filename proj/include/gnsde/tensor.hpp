#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace gnsde {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape);
std::string to_string(const Shape& shape);

namespace detail {

struct Node;
using BackwardFn = std::function<void(Node& out)>;

// One recorded value. Leaves (parameters, inputs) have no backward rule.
struct Node {
  Shape shape;
  std::vector<double> data;
  std::vector<double> grad;  // empty until first accumulation
  bool requires_grad = false;
  std::uint64_t seq = 0;     // creation order; inputs always have a smaller seq
  const char* op = "leaf";
  std::vector<std::shared_ptr<Node>> inputs;
  BackwardFn backward;

  // Allocates the gradient buffer on first use.
  std::vector<double>& grad_buffer();
};

}  // namespace detail

/// Dense row-major float64 array that participates in reverse-mode
/// differentiation. Copies share the underlying node.
class Tensor {
 public:
  Tensor() = default;
  Tensor(Shape shape, std::vector<double> data, bool requires_grad = false);

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);
  static Tensor matrix(std::initializer_list<std::initializer_list<double>> rows,
                       bool requires_grad = false);

  bool defined() const noexcept { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t dim() const { return shape().size(); }
  std::size_t numel() const;
  std::size_t rows() const;
  std::size_t cols() const;

  std::span<const double> data() const;
  double item() const;
  double operator[](std::size_t flat) const { return data()[flat]; }
  double at(std::size_t r, std::size_t c) const;

  bool requires_grad() const;
  /// Marks a leaf as trainable. Only valid on tensors with no recorded history.
  Tensor& set_requires_grad(bool on);
  bool has_grad() const;
  /// Gradient buffer; zeros of the right size if nothing accumulated yet.
  std::vector<double> grad() const;
  void zero_grad();

  /// In-place access to leaf values, used by optimizers and checkpoint loading.
  std::span<double> mutable_data();

  /// Same values, detached from any history.
  Tensor detach() const;

  const char* op_name() const;
  std::uint64_t seq() const;

  detail::Node* node() const noexcept { return node_.get(); }
  const std::shared_ptr<detail::Node>& node_ptr() const noexcept { return node_; }

  static Tensor from_node(std::shared_ptr<detail::Node> node);

 private:
  std::shared_ptr<detail::Node> node_;
};

/// Disables recording while alive (thread-local). Results of ops created under
/// the guard never require gradients.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_enabled();

/// Builds an op result: validates finiteness, records inputs and the backward
/// rule when any input requires gradients and recording is enabled.
Tensor make_result(const char* op, Shape shape, std::vector<double> data,
                   std::vector<Tensor> inputs, detail::BackwardFn backward);

/// Reverse topological visit order of every recorded op reachable from a root.
class Tape {
 public:
  static Tape record(const Tensor& root);

  /// Ops in forward (topological) order.
  const std::vector<detail::Node*>& ops() const noexcept { return ops_; }

  /// Seeds d(root)/d(root) = 1 and runs each backward rule once, in reverse.
  void backward();

 private:
  Tensor root_;
  std::vector<detail::Node*> ops_;
};

/// Populates grads of every requires_grad tensor reachable from `loss`.
/// Throws DimensionError when `loss` is not a scalar.
void backward(const Tensor& loss);

}  // namespace gnsde
