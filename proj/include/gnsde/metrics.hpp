#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gnsde/summary.hpp"

namespace gnsde {

/// Items are retained when their uncertainty is strictly below the
/// threshold. The metric is empty when nothing is retained.
struct SelectiveResult {
  double threshold = 0.0;
  double coverage = 0.0;
  std::size_t retained = 0;
  std::optional<double> accuracy;
};

/// Plain accuracy of predicted classes over the masked nodes. Throws
/// InvalidArgument when the mask is empty.
double accuracy(std::span<const int> predicted, std::span<const int> labels, std::span<const std::uint8_t> mask);

/// Accuracy over masked nodes whose predictive entropy is below each threshold.
/// Thresholds may be +infinity.
std::vector<SelectiveResult> selective_accuracy(const PredictiveSummary& summary, std::span<const int> labels,
                                                std::span<const std::uint8_t> mask,
                                                std::span<const double> thresholds);

/// Mean of 1/2 log(2 pi v) + (y - mu)^2 / (2 v) with v = max(var, floor).
double gaussian_nll(std::span<const double> y, std::span<const double> mu, std::span<const double> var,
                    double floor = 1e-3);

struct RegressionMetrics {
  double mae = 0.0;
  /// Percent; targets with |y| < 1e-8 are skipped. Empty if all were.
  std::optional<double> mape;
  double mse = 0.0;
};

/// Throws InvalidArgument on empty input and DimensionError on length mismatch.
RegressionMetrics regression_metrics(std::span<const double> y, std::span<const double> yhat);

struct ThresholdRow {
  double threshold = 0.0;
  double coverage = 0.0;
  std::size_t retained = 0;
  std::optional<double> mae;
  std::optional<double> mape;
  std::optional<double> mse;
  std::optional<double> nll;
};

/// Regression metrics over points whose predictive variance is below each
/// threshold. `summary` must be [points x 1].
std::vector<ThresholdRow> variance_threshold_eval(const PredictiveSummary& summary, std::span<const double> y,
                                                  std::span<const double> thresholds, double var_floor = 1e-3);

/// Mean log-probability of the true class over masked nodes.
double mean_log_probability(const PredictiveSummary& summary, std::span<const int> labels,
                            std::span<const std::uint8_t> mask);

}  // namespace gnsde
