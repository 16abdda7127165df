#pragma once

#include <cstddef>
#include <vector>

#include "gnsde/tensor.hpp"

namespace gnsde {

/// Monte-Carlo summary of N stochastic predictions, each [rows x d].
/// Categorical summaries hold class probabilities per sample; `mean` is then
/// the averaged predictive distribution and `entropy` its per-row entropy.
struct PredictiveSummary {
  bool categorical = false;
  std::vector<Tensor> samples;
  Tensor mean;      // [rows x d]
  Tensor variance;  // [rows x d], population form (1/N) sum (y_n - mean)^2
  Tensor entropy;   // [rows], categorical only

  std::size_t num_samples() const noexcept { return samples.size(); }
  std::size_t rows() const { return mean.rows(); }
  const Tensor& probs() const { return mean; }
  /// Argmax of the mean row, lowest index on ties.
  std::vector<int> predicted_classes() const;
};

/// Throws InvalidArgument when `samples` is empty or shapes differ.
PredictiveSummary summarize(std::vector<Tensor> samples, bool categorical);

/// -sum_c p log p per row with 0 log 0 = 0. Throws DomainError when a row
/// sums to anything outside 1 +- 1e-6 or has negative entries.
Tensor predictive_entropy(const Tensor& probs);

}  // namespace gnsde
