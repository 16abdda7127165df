#include "gnsde/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gnsde/error.hpp"

namespace gnsde {

namespace {

using detail::Node;

inline bool wants_grad(const std::shared_ptr<Node>& n) { return n->requires_grad; }

void require_matrix(const Tensor& t, const char* op) {
  if (t.dim() != 2) {
    throw DimensionError(std::string(op) + ": expected a matrix, got " + to_string(t.shape()));
  }
}

// out[m x n] += a[m x k] * b[k x n]
void gemm_nn(const double* a, const double* b, double* out, std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    double* orow = out + i * n;
    const double* arow = a + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = arow[p];
      if (av == 0.0) continue;
      const double* brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) orow[j] += av * brow[j];
    }
  }
}

// out[m x k] += g[m x n] * b[k x n]^T
void gemm_nt(const double* g, const double* b, double* out, std::size_t m, std::size_t n, std::size_t k) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* grow = g + i * n;
    double* orow = out + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const double* brow = b + p * n;
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += grow[j] * brow[j];
      orow[p] += acc;
    }
  }
}

// out[k x n] += a[m x k]^T * g[m x n]
void gemm_tn(const double* a, const double* g, double* out, std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = a + i * k;
    const double* grow = g + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = arow[p];
      if (av == 0.0) continue;
      double* orow = out + p * n;
      for (std::size_t j = 0; j < n; ++j) orow[j] += av * grow[j];
    }
  }
}

enum class Broadcast { none, left_scalar, right_scalar };

Broadcast check_binary(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() == b.shape()) return Broadcast::none;
  if (a.numel() == 1) return Broadcast::left_scalar;
  if (b.numel() == 1) return Broadcast::right_scalar;
  throw DimensionError(std::string(op) + ": shape mismatch " + to_string(a.shape()) + " vs " +
                       to_string(b.shape()));
}

template <typename Fwd, typename GradA, typename GradB>
Tensor binary(const char* op, const Tensor& a, const Tensor& b, Fwd fwd, GradA grad_a, GradB grad_b) {
  const auto mode = check_binary(a, b, op);
  const Shape shape = mode == Broadcast::left_scalar ? b.shape() : a.shape();
  const std::size_t n = numel(shape);
  auto ad = a.data();
  auto bd = b.data();
  auto ia = [mode](std::size_t i) { return mode == Broadcast::left_scalar ? 0 : i; };
  auto ib = [mode](std::size_t i) { return mode == Broadcast::right_scalar ? 0 : i; };
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = fwd(ad[ia(i)], bd[ib(i)]);
  return make_result(op, shape, std::move(out), {a, b}, [grad_a, grad_b, ia, ib](Node& o) {
    auto& an = o.inputs[0];
    auto& bn = o.inputs[1];
    const auto& g = o.grad;
    if (wants_grad(an)) {
      auto& ga = an->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) {
        ga[ia(i)] += grad_a(an->data[ia(i)], bn->data[ib(i)], g[i]);
      }
    }
    if (wants_grad(bn)) {
      auto& gb = bn->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) {
        gb[ib(i)] += grad_b(an->data[ia(i)], bn->data[ib(i)], g[i]);
      }
    }
  });
}

// Pointwise op where the derivative is expressed through input x and output y.
template <typename Fwd, typename Deriv>
Tensor unary(const char* op, const Tensor& x, Fwd fwd, Deriv deriv) {
  auto xd = x.data();
  std::vector<double> out(xd.size());
  for (std::size_t i = 0; i < xd.size(); ++i) out[i] = fwd(xd[i]);
  auto result = make_result(op, x.shape(), std::move(out), {x}, nullptr);
  if (result.requires_grad()) {
    // The rule reads the output values, so it is attached after construction.
    result.node()->backward = [deriv](Node& o) {
      auto& xn = o.inputs[0];
      auto& gx = xn->grad_buffer();
      for (std::size_t i = 0; i < o.grad.size(); ++i) gx[i] += o.grad[i] * deriv(xn->data[i], o.data[i]);
    };
  }
  return result;
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_matrix(a, "matmul");
  require_matrix(b, "matmul");
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  if (b.rows() != k) {
    throw DimensionError("matmul: inner extents differ, " + to_string(a.shape()) + " x " + to_string(b.shape()));
  }
  std::vector<double> out(m * n, 0.0);
  gemm_nn(a.data().data(), b.data().data(), out.data(), m, k, n);
  return make_result("matmul", {m, n}, std::move(out), {a, b}, [m, k, n](Node& o) {
    auto& an = o.inputs[0];
    auto& bn = o.inputs[1];
    if (wants_grad(an)) gemm_nt(o.grad.data(), bn->data.data(), an->grad_buffer().data(), m, n, k);
    if (wants_grad(bn)) gemm_tn(an->data.data(), o.grad.data(), bn->grad_buffer().data(), m, k, n);
  });
}

Tensor add(const Tensor& a, const Tensor& b) {
  return binary(
      "add", a, b, [](double x, double y) { return x + y; }, [](double, double, double g) { return g; },
      [](double, double, double g) { return g; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return binary(
      "sub", a, b, [](double x, double y) { return x - y; }, [](double, double, double g) { return g; },
      [](double, double, double g) { return -g; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return binary(
      "mul", a, b, [](double x, double y) { return x * y; }, [](double, double y, double g) { return g * y; },
      [](double x, double, double g) { return g * x; });
}

Tensor div(const Tensor& a, const Tensor& b) {
  for (double v : b.data()) {
    if (v == 0.0) throw DomainError("div: division by zero");
  }
  return binary(
      "div", a, b, [](double x, double y) { return x / y; }, [](double, double y, double g) { return g / y; },
      [](double x, double y, double g) { return -g * x / (y * y); });
}

Tensor scale(const Tensor& x, double factor) {
  return unary(
      "scale", x, [factor](double v) { return v * factor; }, [factor](double, double) { return factor; });
}

Tensor add_scalar(const Tensor& x, double value) {
  return unary(
      "add_scalar", x, [value](double v) { return v + value; }, [](double, double) { return 1.0; });
}

Tensor tanh(const Tensor& x) {
  return unary(
      "tanh", x, [](double v) { return std::tanh(v); }, [](double, double y) { return 1.0 - y * y; });
}

Tensor relu(const Tensor& x) {
  return unary(
      "relu", x, [](double v) { return v > 0.0 ? v : 0.0; }, [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Tensor exp(const Tensor& x) {
  return unary(
      "exp", x, [](double v) { return std::exp(v); }, [](double, double y) { return y; });
}

Tensor log(const Tensor& x) {
  for (double v : x.data()) {
    if (!(v > 0.0)) throw DomainError("log of non-positive value " + std::to_string(v));
  }
  return unary(
      "log", x, [](double v) { return std::log(v); }, [](double v, double) { return 1.0 / v; });
}

Tensor square(const Tensor& x) {
  return unary(
      "square", x, [](double v) { return v * v; }, [](double v, double) { return 2.0 * v; });
}

Tensor sum(const Tensor& x) {
  double acc = 0.0;
  for (double v : x.data()) acc += v;
  return make_result("sum", {1}, {acc}, {x}, [](Node& o) {
    auto& gx = o.inputs[0]->grad_buffer();
    for (auto& g : gx) g += o.grad[0];
  });
}

Tensor mean(const Tensor& x) { return scale(sum(x), 1.0 / static_cast<double>(x.numel())); }

Tensor add_row_bias(const Tensor& x, const Tensor& bias) {
  require_matrix(x, "add_row_bias");
  const std::size_t n = x.rows(), d = x.cols();
  if (bias.numel() != d) {
    throw DimensionError("add_row_bias: bias " + to_string(bias.shape()) + " does not fit " + to_string(x.shape()));
  }
  auto xd = x.data();
  auto bd = bias.data();
  std::vector<double> out(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) out[i * d + j] = xd[i * d + j] + bd[j];
  }
  return make_result("add_row_bias", {n, d}, std::move(out), {x, bias}, [n, d](Node& o) {
    auto& xn = o.inputs[0];
    auto& bn = o.inputs[1];
    if (wants_grad(xn)) {
      auto& gx = xn->grad_buffer();
      for (std::size_t i = 0; i < o.grad.size(); ++i) gx[i] += o.grad[i];
    }
    if (wants_grad(bn)) {
      auto& gb = bn->grad_buffer();
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) gb[j] += o.grad[i * d + j];
      }
    }
  });
}

Tensor concat_cols(const Tensor& a, const Tensor& b) {
  require_matrix(a, "concat_cols");
  require_matrix(b, "concat_cols");
  if (a.rows() != b.rows()) {
    throw DimensionError("concat_cols: row counts differ, " + to_string(a.shape()) + " vs " + to_string(b.shape()));
  }
  const std::size_t n = a.rows(), da = a.cols(), db = b.cols(), d = da + db;
  std::vector<double> out(n * d);
  auto ad = a.data();
  auto bd = b.data();
  for (std::size_t i = 0; i < n; ++i) {
    std::copy_n(ad.begin() + i * da, da, out.begin() + i * d);
    std::copy_n(bd.begin() + i * db, db, out.begin() + i * d + da);
  }
  return make_result("concat_cols", {n, d}, std::move(out), {a, b}, [n, da, db, d](Node& o) {
    auto& an = o.inputs[0];
    auto& bn = o.inputs[1];
    if (wants_grad(an)) {
      auto& ga = an->grad_buffer();
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < da; ++j) ga[i * da + j] += o.grad[i * d + j];
      }
    }
    if (wants_grad(bn)) {
      auto& gb = bn->grad_buffer();
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < db; ++j) gb[i * db + j] += o.grad[i * d + da + j];
      }
    }
  });
}

Tensor append_constant_col(const Tensor& x, double value) {
  require_matrix(x, "append_constant_col");
  return concat_cols(x, Tensor::full({x.rows(), 1}, value));
}

Tensor gather(const Tensor& x, std::span<const std::size_t> flat_indices) {
  if (flat_indices.empty()) throw InvalidArgument("gather: no indices");
  auto xd = x.data();
  std::vector<double> out(flat_indices.size());
  for (std::size_t i = 0; i < flat_indices.size(); ++i) {
    if (flat_indices[i] >= xd.size()) throw DimensionError("gather: index out of range");
    out[i] = xd[flat_indices[i]];
  }
  std::vector<std::size_t> idx(flat_indices.begin(), flat_indices.end());
  return make_result("gather", {idx.size()}, std::move(out), {x}, [idx](Node& o) {
    auto& gx = o.inputs[0]->grad_buffer();
    for (std::size_t i = 0; i < idx.size(); ++i) gx[idx[i]] += o.grad[i];
  });
}

Tensor softmax_rows(const Tensor& x) {
  require_matrix(x, "softmax_rows");
  const std::size_t n = x.rows(), c = x.cols();
  auto xd = x.data();
  std::vector<double> out(n * c);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = xd.data() + i * c;
    double mx = *std::max_element(row, row + c);
    double z = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      out[i * c + j] = std::exp(row[j] - mx);
      z += out[i * c + j];
    }
    for (std::size_t j = 0; j < c; ++j) out[i * c + j] /= z;
  }
  auto result = make_result("softmax_rows", {n, c}, std::move(out), {x}, nullptr);
  if (result.requires_grad()) {
    result.node()->backward = [n, c](Node& o) {
      auto& gx = o.inputs[0]->grad_buffer();
      for (std::size_t i = 0; i < n; ++i) {
        const double* p = o.data.data() + i * c;
        const double* g = o.grad.data() + i * c;
        double dot = 0.0;
        for (std::size_t j = 0; j < c; ++j) dot += p[j] * g[j];
        for (std::size_t j = 0; j < c; ++j) gx[i * c + j] += p[j] * (g[j] - dot);
      }
    };
  }
  return result;
}

// Keeps -log finite when a probability underflows to zero.
constexpr double kProbFloor = std::numeric_limits<double>::min();

Tensor cross_entropy(const Tensor& probs, std::span<const int> labels, std::span<const std::uint8_t> mask) {
  require_matrix(probs, "cross_entropy");
  const std::size_t n = probs.rows(), c = probs.cols();
  if (labels.size() != n || mask.size() != n) {
    throw DimensionError("cross_entropy: labels/mask length must equal " + std::to_string(n) + " rows");
  }
  std::vector<std::size_t> picked;
  double acc = 0.0;
  auto pd = probs.data();
  for (std::size_t i = 0; i < n; ++i) {
    if (!mask[i]) continue;
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= c) {
      throw DomainError("cross_entropy: label " + std::to_string(labels[i]) + " outside [0," + std::to_string(c) + ")");
    }
    const std::size_t at = i * c + static_cast<std::size_t>(labels[i]);
    picked.push_back(at);
    acc -= std::log(std::max(pd[at], kProbFloor));
  }
  if (picked.empty()) throw InvalidArgument("cross_entropy: mask selects no nodes");
  const double inv = 1.0 / static_cast<double>(picked.size());
  return make_result("cross_entropy", {1}, {acc * inv}, {probs}, [picked, inv](Node& o) {
    auto& pn = o.inputs[0];
    auto& gp = pn->grad_buffer();
    for (auto at : picked) gp[at] -= o.grad[0] * inv / std::max(pn->data[at], kProbFloor);
  });
}

}  // namespace gnsde
