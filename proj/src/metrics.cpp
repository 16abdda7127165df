#include "gnsde/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "gnsde/error.hpp"

namespace gnsde {

namespace {

void check_lengths(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": lengths " + std::to_string(a) + " and " + std::to_string(b) +
                         " differ");
  }
}

}  // namespace

double accuracy(std::span<const int> predicted, std::span<const int> labels, std::span<const std::uint8_t> mask) {
  check_lengths(predicted.size(), labels.size(), "accuracy");
  check_lengths(predicted.size(), mask.size(), "accuracy");
  std::size_t hits = 0, total = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (!mask[i]) continue;
    ++total;
    hits += predicted[i] == labels[i] ? 1 : 0;
  }
  if (total == 0) throw InvalidArgument("accuracy: mask selects no nodes");
  return static_cast<double>(hits) / static_cast<double>(total);
}

std::vector<SelectiveResult> selective_accuracy(const PredictiveSummary& summary, std::span<const int> labels,
                                                std::span<const std::uint8_t> mask,
                                                std::span<const double> thresholds) {
  if (!summary.categorical) throw InvalidArgument("selective_accuracy needs a categorical summary");
  const auto predicted = summary.predicted_classes();
  check_lengths(predicted.size(), labels.size(), "selective_accuracy");
  check_lengths(predicted.size(), mask.size(), "selective_accuracy");
  auto entropy = summary.entropy.data();
  const auto masked = static_cast<std::size_t>(std::count_if(mask.begin(), mask.end(), [](auto m) { return m; }));
  std::vector<SelectiveResult> out;
  for (double threshold : thresholds) {
    SelectiveResult r;
    r.threshold = threshold;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
      if (!mask[i] || !(entropy[i] < threshold)) continue;
      ++r.retained;
      hits += predicted[i] == labels[i] ? 1 : 0;
    }
    r.coverage = masked ? static_cast<double>(r.retained) / static_cast<double>(masked) : 0.0;
    if (r.retained) r.accuracy = static_cast<double>(hits) / static_cast<double>(r.retained);
    out.push_back(r);
  }
  return out;
}

double gaussian_nll(std::span<const double> y, std::span<const double> mu, std::span<const double> var,
                    double floor) {
  check_lengths(y.size(), mu.size(), "gaussian_nll");
  check_lengths(y.size(), var.size(), "gaussian_nll");
  if (y.empty()) throw InvalidArgument("gaussian_nll: no points");
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double v = std::max(var[i], floor);
    const double r = y[i] - mu[i];
    acc += 0.5 * std::log(2.0 * std::numbers::pi * v) + r * r / (2.0 * v);
  }
  return acc / static_cast<double>(y.size());
}

RegressionMetrics regression_metrics(std::span<const double> y, std::span<const double> yhat) {
  check_lengths(y.size(), yhat.size(), "regression_metrics");
  if (y.empty()) throw InvalidArgument("regression_metrics: no points");
  RegressionMetrics m;
  double ape = 0.0;
  std::size_t ape_count = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = yhat[i] - y[i];
    m.mae += std::abs(r);
    m.mse += r * r;
    if (std::abs(y[i]) >= 1e-8) {
      ape += std::abs(r / y[i]);
      ++ape_count;
    }
  }
  const auto n = static_cast<double>(y.size());
  m.mae /= n;
  m.mse /= n;
  if (ape_count) m.mape = 100.0 * ape / static_cast<double>(ape_count);
  return m;
}

std::vector<ThresholdRow> variance_threshold_eval(const PredictiveSummary& summary, std::span<const double> y,
                                                  std::span<const double> thresholds, double var_floor) {
  if (summary.mean.dim() != 2 || summary.mean.cols() != 1) {
    throw DimensionError("variance_threshold_eval expects a [points x 1] summary");
  }
  check_lengths(summary.rows(), y.size(), "variance_threshold_eval");
  auto mean = summary.mean.data();
  auto var = summary.variance.data();
  std::vector<ThresholdRow> out;
  for (double threshold : thresholds) {
    ThresholdRow row;
    row.threshold = threshold;
    std::vector<double> ys, mus, vs;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (!(var[i] < threshold)) continue;
      ys.push_back(y[i]);
      mus.push_back(mean[i]);
      vs.push_back(var[i]);
    }
    row.retained = ys.size();
    row.coverage = y.empty() ? 0.0 : static_cast<double>(ys.size()) / static_cast<double>(y.size());
    if (!ys.empty()) {
      const auto m = regression_metrics(ys, mus);
      row.mae = m.mae;
      row.mape = m.mape;
      row.mse = m.mse;
      row.nll = gaussian_nll(ys, mus, vs, var_floor);
    }
    out.push_back(row);
  }
  return out;
}

double mean_log_probability(const PredictiveSummary& summary, std::span<const int> labels,
                            std::span<const std::uint8_t> mask) {
  if (!summary.categorical) throw InvalidArgument("mean_log_probability needs a categorical summary");
  const std::size_t n = summary.rows(), c = summary.mean.cols();
  check_lengths(n, labels.size(), "mean_log_probability");
  check_lengths(n, mask.size(), "mean_log_probability");
  auto p = summary.mean.data();
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!mask[i]) continue;
    const auto label = static_cast<std::size_t>(labels[i]);
    if (label >= c) throw DomainError("label " + std::to_string(labels[i]) + " outside the class range");
    acc += std::log(std::max(p[i * c + label], std::numeric_limits<double>::min()));
    ++count;
  }
  if (count == 0) throw InvalidArgument("mean_log_probability: mask selects no nodes");
  return acc / static_cast<double>(count);
}

}  // namespace gnsde
