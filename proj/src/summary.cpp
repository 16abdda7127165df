#include "gnsde/summary.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gnsde/error.hpp"

namespace gnsde {

std::vector<int> PredictiveSummary::predicted_classes() const {
  const std::size_t n = mean.rows(), c = mean.cols();
  std::vector<int> out(n);
  auto p = mean.data();
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < c; ++j) {
      if (p[i * c + j] > p[i * c + best]) best = j;
    }
    out[i] = static_cast<int>(best);
  }
  return out;
}

PredictiveSummary summarize(std::vector<Tensor> samples, bool categorical) {
  if (samples.empty()) throw InvalidArgument("summarize needs at least one sample");
  const auto shape = samples.front().shape();
  if (shape.size() != 2) throw DimensionError("samples must be matrices, got " + to_string(shape));
  for (const auto& s : samples) {
    if (s.shape() != shape) throw DimensionError("sample shapes differ");
  }
  const std::size_t size = numel(shape);
  const double inv_n = 1.0 / static_cast<double>(samples.size());
  std::vector<double> mean(size, 0.0), var(size, 0.0);
  for (const auto& s : samples) {
    auto d = s.data();
    for (std::size_t i = 0; i < size; ++i) mean[i] += d[i];
  }
  for (auto& m : mean) m *= inv_n;
  for (const auto& s : samples) {
    auto d = s.data();
    for (std::size_t i = 0; i < size; ++i) {
      const double r = d[i] - mean[i];
      var[i] += r * r;
    }
  }
  for (auto& v : var) v *= inv_n;

  PredictiveSummary out;
  out.categorical = categorical;
  out.mean = Tensor(shape, std::move(mean));
  out.variance = Tensor(shape, std::move(var));
  if (categorical) out.entropy = predictive_entropy(out.mean);
  out.samples = std::move(samples);
  return out;
}

Tensor predictive_entropy(const Tensor& probs) {
  if (probs.dim() != 2) throw DimensionError("predictive_entropy expects [n x c], got " + to_string(probs.shape()));
  const std::size_t n = probs.rows(), c = probs.cols();
  auto p = probs.data();
  std::vector<double> h(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double total = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      const double v = p[i * c + j];
      if (v < 0.0) throw DomainError("negative probability in row " + std::to_string(i));
      total += v;
      if (v > 0.0) h[i] -= v * std::log(v);
    }
    if (std::abs(total - 1.0) > 1e-6) {
      throw DomainError("row " + std::to_string(i) + " sums to " + std::to_string(total) + ", not 1");
    }
    // Rounding can push the value a hair outside [0, ln c].
    h[i] = std::clamp(h[i], 0.0, std::log(static_cast<double>(c)));
  }
  return Tensor({n}, std::move(h));
}

}  // namespace gnsde
