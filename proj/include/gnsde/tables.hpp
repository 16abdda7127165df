#pragma once

#include <span>
#include <vector>

#include "gnsde/experiments.hpp"
#include "gnsde/report.hpp"

namespace gnsde {

/// method, sweep value, metric mean and sd over seeds, seeds used, diverged
/// cells, coverage. The metric is test accuracy, or the mean log-probability
/// of the true class for the noise curve.
CsvTable curve_table(CurveKind kind, std::span<const CurvePoint> points);
/// One line per method with a +-1 sd band.
PlotSpec curve_plot(CurveKind kind, std::span<const CurvePoint> points);

/// Traces of one method and acquisition rule, one per seed.
struct ActiveTraces {
  Method method = Method::gnsde;
  Acquisition acquisition = Acquisition::max_entropy;
  std::vector<std::uint64_t> seeds;
  std::vector<std::vector<ActiveRound>> traces;
};

/// seed, round, labeled, chosen node, accuracy.
CsvTable active_table(const ActiveTraces& traces);
/// Mean accuracy against labeled-set size, one line per trace set.
PlotSpec active_plot(std::span<const ActiveTraces> sets);

/// method, threshold, then coverage and MAE/MAPE/MSE/NLL averaged over the
/// seeds where the threshold retained at least one point.
CsvTable regression_threshold_table(std::span<const RegressionRun> runs);
/// method, seed and the mean predictive variance per region.
CsvTable regression_variance_table(std::span<const RegressionRun> runs);
/// NLL against variance threshold per method.
PlotSpec regression_plot(std::span<const RegressionRun> runs);

}  // namespace gnsde
