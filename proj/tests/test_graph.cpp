#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "gnsde/error.hpp"
#include "gnsde/graph.hpp"
#include "gnsde/ops.hpp"
#include "gradcheck.hpp"

using namespace gnsde;
namespace fs = std::filesystem;

namespace {

// Dense D^-1/2 (A + I) D^-1/2 built from scratch.
std::vector<std::vector<double>> dense_normalized(std::size_t n, const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (auto [u, v] : edges) {
    if (u == v) continue;
    a[u][v] = 1.0;
    a[v][u] = 1.0;
  }
  for (std::size_t i = 0; i < n; ++i) a[i][i] = 1.0;
  std::vector<double> deg(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) deg[i] += a[i][j];
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] /= std::sqrt(deg[i] * deg[j]);
  }
  return a;
}

fs::path scratch_dir(const char* name) {
  auto dir = fs::temp_directory_path() / ("gnsde_graph_" + std::string(name));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("construction drops self-loops and duplicate edges") {
  SparseGraph g(4, {{1, 0}, {0, 1}, {2, 2}, {3, 1}, {1, 3}});
  REQUIRE(g.edges().size() == 2);
  CHECK(g.edges()[0] == Edge{0, 1});
  CHECK(g.edges()[1] == Edge{1, 3});
  CHECK(g.adjacency_lists()[1] == std::vector<std::size_t>{0, 3});
  CHECK_THROWS_AS(SparseGraph(3, {{0, 3}}), InvalidArgument);
}

TEST_CASE("normalized adjacency matches a dense recomputation") {
  const std::vector<std::pair<int, int>> pairs{{0, 1}, {1, 2}, {2, 0}, {2, 3}, {4, 4}};
  std::vector<Edge> edges;
  for (auto [u, v] : pairs) edges.push_back({static_cast<std::size_t>(u), static_cast<std::size_t>(v)});
  auto adj = normalize(SparseGraph(5, edges));
  auto expected = dense_normalized(5, pairs);
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) CHECK(adj.value(i, j) == doctest::Approx(expected[i][j]).epsilon(1e-14));
  }
  // The isolated node keeps only its self-loop.
  CHECK(adj.value(4, 4) == 1.0);
  CHECK(adj.nnz() == 5 + 2 * 4);
}

TEST_CASE("spmm equals dense matmul") {
  std::mt19937_64 gen(5);
  auto adj = normalize(SparseGraph(6, {{0, 1}, {1, 2}, {3, 4}, {4, 5}, {5, 0}, {2, 5}}));
  auto x = testing::random_tensor({6, 3}, gen, -1.0, 1.0, false);
  auto sparse = spmm(adj, x);
  auto dense = matmul(adj.dense(), x);
  for (std::size_t i = 0; i < sparse.numel(); ++i) CHECK(sparse[i] == doctest::Approx(dense[i]).epsilon(1e-13));
}

TEST_CASE("gcn layer is equivariant to node relabeling") {
  std::mt19937_64 gen(9);
  SparseGraph g(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}, {1, 3}});
  const std::vector<std::size_t> perm{3, 0, 4, 1, 2};
  auto x = testing::random_tensor({5, 2}, gen, -1.0, 1.0, false);
  auto w = testing::random_tensor({2, 3}, gen, -1.0, 1.0, false);
  auto b = testing::random_tensor({3}, gen, -1.0, 1.0, false);
  std::vector<double> px(10);
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t k = 0; k < 2; ++k) px[perm[i] * 2 + k] = x.at(i, k);
  }
  auto base = gcn_layer(normalize(g), x, w, b, Activation::tanh);
  auto moved = gcn_layer(normalize(g.permuted(perm)), Tensor({5, 2}, px), w, b, Activation::tanh);
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t k = 0; k < 3; ++k) CHECK(moved.at(perm[i], k) == doctest::Approx(base.at(i, k)).epsilon(1e-13));
  }
}

TEST_CASE("edge lists round-trip and report bad lines") {
  auto dir = scratch_dir("edges");
  SparseGraph g(5, {{0, 1}, {1, 4}, {2, 3}});
  write_edge_list(dir / "ok.txt", g);
  auto back = read_edge_list(dir / "ok.txt", 5);
  CHECK(back.edges() == g.edges());
  CHECK(back.num_nodes() == 5);

  {
    std::ofstream out(dir / "bad.txt");
    out << "0 1\n# comment\n\n2 x\n";
  }
  try {
    read_edge_list(dir / "bad.txt");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.kind() == ParseError::Kind::malformed);
    CHECK(e.line() == 4);
  }

  {
    std::ofstream out(dir / "range.txt");
    out << "0 1\n1 7\n";
  }
  try {
    read_edge_list(dir / "range.txt", 5);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.kind() == ParseError::Kind::index_out_of_range);
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(read_edge_list(dir / "missing.txt"), ParseError);
}
