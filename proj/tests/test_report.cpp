#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "gnsde/error.hpp"
#include "gnsde/report.hpp"
#include "gnsde/tables.hpp"

using namespace gnsde;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_CASE("numbers format compactly") {
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(1.0 / 3.0) == "0.3333333333");
  CHECK(format_number(inf) == "inf");
  CHECK(format_number(1e-12) == "1e-12");
}

TEST_CASE("csv rows must match the header") {
  CsvTable table({"name", "value", "count", "maybe"});
  table.add_row({std::string("a"), 0.25, std::int64_t{3}, std::optional<double>{}});
  table.add_row({std::string("b"), inf, std::int64_t{-1}, std::optional<double>{2.0}});
  CHECK(table.str() == "name,value,count,maybe\na,0.25,3,\nb,inf,-1,2\n");
  CHECK_THROWS_AS(table.add_row({std::string("c")}), InvalidArgument);

  auto path = std::filesystem::temp_directory_path() / "gnsde_report.csv";
  table.write(path);
  std::ifstream in(path);
  std::stringstream text;
  text << in.rdbuf();
  CHECK(text.str() == table.str());
}

TEST_CASE("svg plots draw each series and label infinite x") {
  PlotSpec plot;
  plot.title = "accuracy";
  plot.series.push_back({"gnsde", {inf, 1.0, 0.5}, {0.9, 0.92, 0.99}, {0.8, 0.9, 0.97}, {1.0, 0.94, 1.0}});
  plot.series.push_back({"gcn", {inf, 1.0, 0.5}, {0.88, 0.9, 0.95}, {}, {}});
  auto svg = render_svg(plot);
  CHECK(svg.starts_with("<svg"));
  CHECK(svg.find("gnsde") != std::string::npos);
  CHECK(svg.find("gcn") != std::string::npos);
  CHECK(svg.find(">inf<") != std::string::npos);

  plot.series.push_back({"broken", {1.0, 2.0}, {1.0}, {}, {}});
  CHECK_THROWS_AS(render_svg(plot), InvalidArgument);
}

TEST_CASE("curve and active tables lay out their columns") {
  std::vector<CurvePoint> points(2);
  points[0] = {Method::gnsde, 0.3, 0.91, 0.01, 3, 0, std::nullopt};
  points[1] = {Method::gcn, 0.3, std::nullopt, std::nullopt, 0, 3, std::nullopt};
  auto table = curve_table(CurveKind::train_fraction, points);
  CHECK(table.str() ==
        "method,train_fraction,accuracy_mean,accuracy_sd,seeds_used,diverged,coverage\n"
        "gnsde,0.3,0.91,0.01,3,0,\n"
        "gcn,0.3,,,0,3,\n");
  CHECK(curve_table(CurveKind::noise_loglik, points).header()[2] == "true_class_log_prob_mean");

  ActiveTraces traces;
  traces.seeds = {7};
  traces.traces = {{{10, 4, 0.5}, {11, std::nullopt, 0.6}}};
  CHECK(active_table(traces).str() == "seed,round,labeled,chosen,accuracy\n7,0,10,4,0.5\n7,1,11,,0.6\n");
}

TEST_CASE("regression tables average over seeds that retained points") {
  RegressionRun a, b;
  a.method = b.method = Method::gnsde;
  a.seed = 0;
  b.seed = 1;
  a.rows = {{3.0, 1.0, 10, 1.0, 10.0, 2.0, 4.0}};
  b.rows = {{3.0, 0.0, 0, std::nullopt, std::nullopt, std::nullopt, std::nullopt}};
  a.variance_train = 0.5;
  const std::vector<RegressionRun> runs{a, b};
  CHECK(regression_threshold_table(runs).str() ==
        "method,variance_threshold,coverage,mae,mape,mse,nll,seeds_retained\ngnsde,3,0.5,1,10,2,4,1\n");
  CHECK(regression_variance_table(runs).rows() == 2);
}
