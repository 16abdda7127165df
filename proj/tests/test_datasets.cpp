#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "gnsde/datasets.hpp"
#include "gnsde/error.hpp"

using namespace gnsde;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const char* name) {
  auto dir = fs::temp_directory_path() / ("gnsde_data_" + std::string(name));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

ParseError::Kind parse_error_kind(const fs::path& dir) {
  try {
    load_planetoid(dir);
  } catch (const ParseError& e) {
    return e.kind();
  }
  FAIL("expected a parse error");
  return ParseError::Kind::malformed;
}

}  // namespace

TEST_CASE("voting data has the requested size, split and degree") {
  VotingConfig config;
  config.seed = 4;
  auto data = gen_voting(config);
  CHECK(data.num_nodes() == 300);
  CHECK(data.num_classes() == 3);
  CHECK(data.features.shape() == Shape{300, 2});
  auto train = data.mask(Split::train);
  auto test = data.mask(Split::test);
  CHECK(std::accumulate(train.begin(), train.end(), 0) == 150);
  CHECK(std::accumulate(test.begin(), test.end(), 0) == 150);
  CHECK(data.graph.edges().size() == 900);

  std::size_t same = 0;
  for (const auto& e : data.graph.edges()) same += data.labels[e.src] == data.labels[e.dst];
  const double observed = static_cast<double>(same) / 900.0;
  // Same-class partners are drawn with probability h; repeated pairs are
  // more likely inside a class, so the share sits slightly below h.
  CHECK(observed > 0.52);
  CHECK(observed <= 0.62);
}

TEST_CASE("voting features cluster around the triangle vertices") {
  VotingConfig config;
  config.n = 3000;
  config.noise_sd = 0.1;
  auto data = gen_voting(config);
  std::vector<double> cx(3, 0.0), cy(3, 0.0), count(3, 0.0);
  for (std::size_t i = 0; i < data.num_nodes(); ++i) {
    const auto k = static_cast<std::size_t>(data.labels[i]);
    cx[k] += data.features.at(i, 0);
    cy[k] += data.features.at(i, 1);
    count[k] += 1.0;
  }
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(count[k] > 800.0);
    const double angle = M_PI / 2.0 + 2.0 * M_PI * static_cast<double>(k) / 3.0;
    CHECK(cx[k] / count[k] == doctest::Approx(2.0 * std::cos(angle)).epsilon(0.02).scale(1.0));
    CHECK(cy[k] / count[k] == doctest::Approx(2.0 * std::sin(angle)).epsilon(0.02).scale(1.0));
  }
}

TEST_CASE("voting generation is a pure function of the seed") {
  VotingConfig config;
  config.seed = 9;
  auto a = gen_voting(config), b = gen_voting(config);
  CHECK(a.labels == b.labels);
  CHECK(a.graph.edges() == b.graph.edges());
  CHECK(std::ranges::equal(a.features.data(), b.features.data()));
  config.seed = 10;
  CHECK(gen_voting(config).labels != a.labels);
}

TEST_CASE("three-node signals and windows") {
  auto data = gen_three_node(100, 1);
  CHECK(data.observations.size() == 300);
  CHECK(data.graph.edges() == std::vector<Edge>{{0, 2}, {1, 2}});
  for (std::size_t i = 1; i < data.observations.size(); ++i) {
    CHECK(data.observations[i - 1].time <= data.observations[i].time);
  }
  for (const auto& o : data.observations) {
    CHECK(o.time >= 0.0);
    CHECK(o.time <= 12.0);
    CHECK(o.test == in_test_window(o.time));
  }
  CHECK(in_test_window(4.0));
  CHECK(in_test_window(11.5));
  CHECK_FALSE(in_test_window(7.0));
  CHECK_THROWS_AS(gen_three_node(5, 0), InvalidArgument);

  auto clean = gen_three_node(50, 2, 0.0);
  for (const auto& o : clean.observations) {
    const double truth = o.node == 0 ? three_node_a(o.time) : o.node == 1 ? three_node_b(o.time) : three_node_c(o.time);
    CHECK(o.value == doctest::Approx(truth));
  }
}

TEST_CASE("regression targets snap to the nearest grid point") {
  auto data = gen_three_node(40, 3);
  const TimeGrid grid(0.0, 12.0, 120);
  auto train = regression_targets(data, grid, false);
  auto test = regression_targets(data, grid, true);
  CHECK(train.points.size() + test.points.size() == 120);
  for (const auto& p : train.points) CHECK(p.grid_index <= 120);
  std::size_t k = 0;
  for (const auto& o : data.observations) {
    if (o.test) continue;
    CHECK(std::abs(grid.time(train.points[k].grid_index) - o.time) <= 0.05 + 1e-12);
    CHECK(train.points[k].value == o.value);
    ++k;
  }
}

TEST_CASE("planetoid files round-trip exactly") {
  VotingConfig config;
  config.n = 40;
  auto data = gen_voting(config);
  auto dir = scratch_dir("roundtrip");
  save_planetoid(dir, data);
  auto back = load_planetoid(dir);
  CHECK(back.labels == data.labels);
  CHECK(back.split == data.split);
  CHECK(back.graph.edges() == data.graph.edges());
  CHECK(std::ranges::equal(back.features.data(), data.features.data()));
}

TEST_CASE("planetoid without split tags gets a 60/20/20 split") {
  auto dir = scratch_dir("untagged");
  std::string rows;
  for (int i = 0; i < 10; ++i) rows += std::to_string(i) + ".5\t1\t" + std::to_string(i % 2) + "\n";
  write_file(dir / "nodes.tsv", rows);
  write_file(dir / "edges.txt", "# nodes 10\n0 1\n2 3\n");
  auto data = load_planetoid(dir, 7);
  CHECK(data.features.shape() == Shape{10, 2});
  auto count = [&](Split s) { return std::count(data.split.begin(), data.split.end(), s); };
  CHECK(count(Split::train) == 6);
  CHECK(count(Split::val) == 2);
  CHECK(count(Split::test) == 2);
}

TEST_CASE("planetoid loading reports what is wrong") {
  auto dir = scratch_dir("errors");
  CHECK(parse_error_kind(dir) == ParseError::Kind::missing_file);

  write_file(dir / "edges.txt", "0 1\n");
  write_file(dir / "nodes.tsv", "0.1\t0.2\t1\n0.3\t0.4\t\n");
  CHECK(parse_error_kind(dir) == ParseError::Kind::missing_label);

  write_file(dir / "nodes.tsv", "0.1\t0.2\t1\n0.3\tabc\t0\n");
  try {
    load_planetoid(dir);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.kind() == ParseError::Kind::malformed);
    CHECK(e.line() == 2);
  }

  write_file(dir / "nodes.tsv", "0.1\t0.2\t1\n0.3\t0.5\t0\n");
  write_file(dir / "edges.txt", "# nodes 3\n0 1\n");
  CHECK(parse_error_kind(dir) == ParseError::Kind::row_count_mismatch);

  write_file(dir / "edges.txt", "0 1\n1 2\n");
  CHECK(parse_error_kind(dir) == ParseError::Kind::index_out_of_range);
}

TEST_CASE("feature noise and permutations") {
  VotingConfig config;
  config.n = 50;
  auto data = gen_voting(config);
  auto noisy = add_feature_noise(data, 0.5, 1);
  CHECK(noisy.labels == data.labels);
  CHECK_FALSE(std::ranges::equal(noisy.features.data(), data.features.data()));
  CHECK(std::ranges::equal(add_feature_noise(data, 0.0, 1).features.data(), data.features.data()));
  CHECK_THROWS_AS(add_feature_noise(data, -1.0, 1), InvalidArgument);

  auto perm = shuffled_indices(100, 3, 0);
  auto sorted = perm;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> identity(100);
  std::iota(identity.begin(), identity.end(), 0);
  CHECK(sorted == identity);
  CHECK(perm != identity);
  CHECK(perm == shuffled_indices(100, 3, 0));

  auto targets = class_targets(data, Split::train);
  CHECK(targets.mask == data.mask(Split::train));
}
