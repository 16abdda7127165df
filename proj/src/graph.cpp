#include "gnsde/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "gnsde/error.hpp"
#include "gnsde/ops.hpp"

namespace gnsde {

SparseGraph::SparseGraph(std::size_t n, std::vector<Edge> edges, bool undirected)
    : n_(n), undirected_(undirected) {
  for (const auto& e : edges) {
    if (e.src >= n || e.dst >= n) {
      throw InvalidArgument("edge (" + std::to_string(e.src) + ", " + std::to_string(e.dst) +
                            ") outside node range [0, " + std::to_string(n) + ")");
    }
  }
  std::vector<Edge> canon;
  canon.reserve(edges.size());
  for (auto e : edges) {
    if (e.src == e.dst) continue;
    if (undirected && e.src > e.dst) std::swap(e.src, e.dst);
    canon.push_back(e);
  }
  std::sort(canon.begin(), canon.end());
  canon.erase(std::unique(canon.begin(), canon.end()), canon.end());
  edges_ = std::move(canon);
}

std::vector<std::vector<std::size_t>> SparseGraph::adjacency_lists() const {
  std::vector<std::vector<std::size_t>> adj(n_);
  for (const auto& e : edges_) {
    adj[e.src].push_back(e.dst);
    if (undirected_) adj[e.dst].push_back(e.src);
  }
  for (auto& row : adj) std::sort(row.begin(), row.end());
  return adj;
}

SparseGraph SparseGraph::permuted(const std::vector<std::size_t>& perm) const {
  if (perm.size() != n_) throw DimensionError("permutation length differs from node count");
  std::vector<Edge> out;
  out.reserve(edges_.size());
  for (const auto& e : edges_) out.push_back({perm[e.src], perm[e.dst]});
  return SparseGraph(n_, std::move(out), undirected_);
}

SparseGraph read_edge_list(const std::filesystem::path& path, std::optional<std::size_t> num_nodes) {
  std::ifstream in(path);
  if (!in) throw ParseError(ParseError::Kind::missing_file, path.string(), 0, "cannot open edge list");
  std::vector<Edge> edges;
  std::string line;
  std::size_t lineno = 0;
  std::size_t max_index = 0;
  bool any = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string a, b, extra;
    if (!(fields >> a)) continue;
    if (!(fields >> b) || (fields >> extra)) {
      throw ParseError(ParseError::Kind::malformed, path.string(), lineno, "expected 'src dst'");
    }
    auto parse_index = [&](const std::string& tok) -> std::size_t {
      if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos) {
        throw ParseError(ParseError::Kind::malformed, path.string(), lineno, "bad node index '" + tok + "'");
      }
      return std::stoull(tok);
    };
    Edge e{parse_index(a), parse_index(b)};
    if (num_nodes && (e.src >= *num_nodes || e.dst >= *num_nodes)) {
      throw ParseError(ParseError::Kind::index_out_of_range, path.string(), lineno,
                       "node index outside [0, " + std::to_string(*num_nodes) + ")");
    }
    max_index = std::max({max_index, e.src, e.dst});
    any = true;
    edges.push_back(e);
  }
  const std::size_t n = num_nodes ? *num_nodes : (any ? max_index + 1 : 0);
  return SparseGraph(n, std::move(edges), true);
}

void write_edge_list(const std::filesystem::path& path, const SparseGraph& graph) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "# nodes " << graph.num_nodes() << "\n";
  for (const auto& e : graph.edges()) out << e.src << ' ' << e.dst << '\n';
}

double NormalizedAdjacency::value(std::size_t i, std::size_t j) const {
  auto first = col_indices.begin() + static_cast<std::ptrdiff_t>(row_offsets[i]);
  auto last = col_indices.begin() + static_cast<std::ptrdiff_t>(row_offsets[i + 1]);
  auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return values[static_cast<std::size_t>(it - col_indices.begin())];
}

Tensor NormalizedAdjacency::dense() const {
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto k = row_offsets[i]; k < row_offsets[i + 1]; ++k) d[i * n + col_indices[k]] = values[k];
  }
  return Tensor({n, n}, std::move(d));
}

NormalizedAdjacency normalize(const SparseGraph& graph) {
  const std::size_t n = graph.num_nodes();
  auto lists = graph.adjacency_lists();
  std::vector<double> inv_sqrt_deg(n);
  for (std::size_t i = 0; i < n; ++i) {
    lists[i].insert(std::lower_bound(lists[i].begin(), lists[i].end(), i), i);
    inv_sqrt_deg[i] = 1.0 / std::sqrt(static_cast<double>(lists[i].size()));
  }
  NormalizedAdjacency adj;
  adj.n = n;
  adj.row_offsets.reserve(n + 1);
  adj.row_offsets.push_back(0);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto j : lists[i]) {
      adj.col_indices.push_back(j);
      adj.values.push_back(inv_sqrt_deg[i] * inv_sqrt_deg[j]);
    }
    adj.row_offsets.push_back(adj.col_indices.size());
  }
  return adj;
}

Tensor spmm(const NormalizedAdjacency& adj, const Tensor& x) {
  if (x.dim() != 2 || x.rows() != adj.n) {
    throw DimensionError("spmm: adjacency over " + std::to_string(adj.n) + " nodes cannot multiply " +
                         to_string(x.shape()));
  }
  const std::size_t n = adj.n, d = x.cols();
  auto xd = x.data();
  std::vector<double> out(n * d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double* orow = out.data() + i * d;
    for (auto k = adj.row_offsets[i]; k < adj.row_offsets[i + 1]; ++k) {
      const double v = adj.values[k];
      const double* xrow = xd.data() + adj.col_indices[k] * d;
      for (std::size_t j = 0; j < d; ++j) orow[j] += v * xrow[j];
    }
  }
  const NormalizedAdjacency* a = &adj;
  return make_result("spmm", {n, d}, std::move(out), {x}, [a, n, d](detail::Node& o) {
    auto& gx = o.inputs[0]->grad_buffer();
    for (std::size_t i = 0; i < n; ++i) {
      const double* grow = o.grad.data() + i * d;
      for (auto k = a->row_offsets[i]; k < a->row_offsets[i + 1]; ++k) {
        const double v = a->values[k];
        double* gxrow = gx.data() + a->col_indices[k] * d;
        for (std::size_t j = 0; j < d; ++j) gxrow[j] += v * grow[j];
      }
    }
  });
}

Tensor activate(Activation act, const Tensor& x) {
  switch (act) {
    case Activation::tanh:
      return tanh(x);
    case Activation::relu:
      return relu(x);
    case Activation::none:
      break;
  }
  return x;
}

Tensor gcn_layer(const NormalizedAdjacency& adj, const Tensor& x, const Tensor& weight, const Tensor& bias,
                 Activation act) {
  if (x.dim() != 2 || weight.dim() != 2 || x.cols() != weight.rows()) {
    throw DimensionError("gcn_layer: features " + to_string(x.shape()) + " do not fit weight " +
                         to_string(weight.shape()));
  }
  return activate(act, add_row_bias(spmm(adj, matmul(x, weight)), bias));
}

}  // namespace gnsde
