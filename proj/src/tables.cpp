#include "gnsde/tables.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

namespace gnsde {

namespace {

struct Stats {
  double mean = 0.0;
  double sd = 0.0;
};

Stats stats(const std::vector<double>& v) {
  Stats s;
  if (v.empty()) return s;
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return s;
}

std::optional<double> mean_or_empty(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  return stats(v).mean;
}

std::string metric_name(CurveKind kind) {
  return kind == CurveKind::noise_loglik ? "true_class_log_prob" : "accuracy";
}

std::string x_name(CurveKind kind) {
  switch (kind) {
    case CurveKind::train_fraction:
      return "train_fraction";
    case CurveKind::node_count:
      return "nodes";
    case CurveKind::entropy_threshold:
      return "entropy_threshold";
    case CurveKind::noise_loglik:
      return "noise_sd";
  }
  return "x";
}

// Methods in first-appearance order.
template <typename T, typename Key>
std::vector<Method> methods_in_order(std::span<const T> items, Key key) {
  std::vector<Method> out;
  for (const auto& item : items) {
    const Method m = key(item);
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
  }
  return out;
}

}  // namespace

CsvTable curve_table(CurveKind kind, std::span<const CurvePoint> points) {
  const auto metric = metric_name(kind);
  CsvTable table({"method", x_name(kind), metric + "_mean", metric + "_sd", "seeds_used", "diverged", "coverage"});
  for (const auto& p : points) {
    table.add_row({std::string(to_string(p.method)), p.x, p.mean, p.sd, static_cast<std::int64_t>(p.seeds_used),
                   static_cast<std::int64_t>(p.diverged), p.coverage});
  }
  return table;
}

PlotSpec curve_plot(CurveKind kind, std::span<const CurvePoint> points) {
  PlotSpec plot;
  plot.title = std::string(to_string(kind));
  plot.x_label = x_name(kind);
  plot.y_label = kind == CurveKind::noise_loglik ? "mean log p(true class)" : "test accuracy";
  for (Method m : methods_in_order(points, [](const CurvePoint& p) { return p.method; })) {
    PlotSeries s;
    s.name = std::string(to_string(m));
    for (const auto& p : points) {
      if (p.method != m) continue;
      const double mean = p.mean.value_or(std::nan(""));
      const double sd = p.sd.value_or(0.0);
      s.x.push_back(p.x);
      s.y.push_back(mean);
      s.lower.push_back(mean - sd);
      s.upper.push_back(mean + sd);
    }
    plot.series.push_back(std::move(s));
  }
  return plot;
}

CsvTable active_table(const ActiveTraces& set) {
  CsvTable table({"seed", "round", "labeled", "chosen", "accuracy"});
  for (std::size_t s = 0; s < set.traces.size(); ++s) {
    for (std::size_t r = 0; r < set.traces[s].size(); ++r) {
      const auto& round = set.traces[s][r];
      table.add_row({static_cast<std::int64_t>(set.seeds.at(s)), static_cast<std::int64_t>(r),
                     static_cast<std::int64_t>(round.labeled),
                     round.chosen ? std::to_string(*round.chosen) : std::string(), round.accuracy});
    }
  }
  return table;
}

PlotSpec active_plot(std::span<const ActiveTraces> sets) {
  PlotSpec plot;
  plot.title = "active learning";
  plot.x_label = "labeled nodes";
  plot.y_label = "accuracy";
  for (const auto& set : sets) {
    PlotSeries s;
    s.name = std::string(to_string(set.method)) + " " + std::string(to_string(set.acquisition));
    std::map<std::size_t, std::vector<double>> by_size;
    for (const auto& trace : set.traces) {
      for (const auto& round : trace) by_size[round.labeled].push_back(round.accuracy);
    }
    for (const auto& [size, acc] : by_size) {
      const auto st = stats(acc);
      s.x.push_back(static_cast<double>(size));
      s.y.push_back(st.mean);
      s.lower.push_back(st.mean - st.sd);
      s.upper.push_back(st.mean + st.sd);
    }
    plot.series.push_back(std::move(s));
  }
  return plot;
}

CsvTable regression_threshold_table(std::span<const RegressionRun> runs) {
  CsvTable table({"method", "variance_threshold", "coverage", "mae", "mape", "mse", "nll", "seeds_retained"});
  for (Method m : methods_in_order(runs, [](const RegressionRun& r) { return r.method; })) {
    const RegressionRun* first = nullptr;
    for (const auto& r : runs) {
      if (r.method == m) {
        first = &r;
        break;
      }
    }
    for (std::size_t k = 0; k < first->rows.size(); ++k) {
      std::vector<double> coverage, mae, mape, mse, nll;
      for (const auto& r : runs) {
        if (r.method != m) continue;
        const auto& row = r.rows.at(k);
        coverage.push_back(row.coverage);
        if (row.mae) mae.push_back(*row.mae);
        if (row.mape) mape.push_back(*row.mape);
        if (row.mse) mse.push_back(*row.mse);
        if (row.nll) nll.push_back(*row.nll);
      }
      table.add_row({std::string(to_string(m)), first->rows[k].threshold, stats(coverage).mean, mean_or_empty(mae),
                     mean_or_empty(mape), mean_or_empty(mse), mean_or_empty(nll),
                     static_cast<std::int64_t>(nll.size())});
    }
  }
  return table;
}

CsvTable regression_variance_table(std::span<const RegressionRun> runs) {
  CsvTable table({"method", "seed", "variance_train", "variance_interpolation", "variance_extrapolation"});
  for (const auto& r : runs) {
    table.add_row({std::string(to_string(r.method)), static_cast<std::int64_t>(r.seed), r.variance_train,
                   r.variance_interpolation, r.variance_extrapolation});
  }
  return table;
}

PlotSpec regression_plot(std::span<const RegressionRun> runs) {
  PlotSpec plot;
  plot.title = "three-node regression";
  plot.x_label = "variance threshold";
  plot.y_label = "NLL on retained test points";
  for (Method m : methods_in_order(runs, [](const RegressionRun& r) { return r.method; })) {
    std::map<double, std::vector<double>> by_threshold;
    for (const auto& r : runs) {
      if (r.method != m) continue;
      for (const auto& row : r.rows) {
        auto& bucket = by_threshold[row.threshold];
        if (row.nll) bucket.push_back(*row.nll);
      }
    }
    PlotSeries s;
    s.name = std::string(to_string(m));
    for (const auto& [threshold, values] : by_threshold) {
      const auto st = stats(values);
      const double mean = values.empty() ? std::nan("") : st.mean;
      s.x.push_back(threshold);
      s.y.push_back(mean);
      s.lower.push_back(mean - st.sd);
      s.upper.push_back(mean + st.sd);
    }
    plot.series.push_back(std::move(s));
  }
  return plot;
}

}  // namespace gnsde
