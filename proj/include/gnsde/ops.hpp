#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gnsde/tensor.hpp"

// Differentiable operations on Tensor. Elementwise binary ops accept equal
// shapes or a single-element operand broadcast against the other.
namespace gnsde {

Tensor matmul(const Tensor& a, const Tensor& b);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& x, double factor);
Tensor add_scalar(const Tensor& x, double value);

Tensor tanh(const Tensor& x);
Tensor relu(const Tensor& x);
Tensor exp(const Tensor& x);
/// Throws DomainError on any non-positive element.
Tensor log(const Tensor& x);
Tensor square(const Tensor& x);

Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);

/// x[n x d] + bias[d] (or [1 x d]) added to every row.
Tensor add_row_bias(const Tensor& x, const Tensor& bias);
/// [a | b] along columns; both n rows.
Tensor concat_cols(const Tensor& a, const Tensor& b);
/// Appends a constant column filled with `value`.
Tensor append_constant_col(const Tensor& x, double value);
/// Flat elements at the given indices, as a [k] vector.
Tensor gather(const Tensor& x, std::span<const std::size_t> flat_indices);

/// Row-wise softmax with row-max subtraction.
Tensor softmax_rows(const Tensor& x);

/// Mean of -log probs[i, labels[i]] over nodes with mask[i] set.
/// Throws InvalidArgument on an empty mask, DimensionError on size mismatch,
/// DomainError when a label is out of range.
Tensor cross_entropy(const Tensor& probs, std::span<const int> labels, std::span<const std::uint8_t> mask);

}  // namespace gnsde
