#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

#include "gnsde/tensor.hpp"

namespace gnsde {

struct Edge {
  std::size_t src = 0;
  std::size_t dst = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Unweighted graph over nodes [0, n). Construction canonicalizes the edge
/// list: self-loops dropped, duplicates removed, and for undirected graphs
/// each edge stored once with src < dst.
class SparseGraph {
 public:
  SparseGraph() = default;
  SparseGraph(std::size_t n, std::vector<Edge> edges, bool undirected = true);

  std::size_t num_nodes() const noexcept { return n_; }
  bool undirected() const noexcept { return undirected_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  /// Out-neighbours with undirected edges expanded both ways, sorted.
  std::vector<std::vector<std::size_t>> adjacency_lists() const;

  /// Relabels node i as perm[i].
  SparseGraph permuted(const std::vector<std::size_t>& perm) const;

 private:
  std::size_t n_ = 0;
  bool undirected_ = true;
  std::vector<Edge> edges_;
};

/// Reads "src dst" pairs, 0-based, one per line; blank lines and '#' comments
/// are skipped. `num_nodes` defaults to max index + 1.
SparseGraph read_edge_list(const std::filesystem::path& path, std::optional<std::size_t> num_nodes = std::nullopt);
void write_edge_list(const std::filesystem::path& path, const SparseGraph& graph);

/// D^-1/2 (A + I) D^-1/2 in CSR form, d_i = degree(i) + 1.
struct NormalizedAdjacency {
  std::size_t n = 0;
  std::vector<std::size_t> row_offsets;
  std::vector<std::size_t> col_indices;
  std::vector<double> values;

  /// Zero when (i, j) is not stored.
  double value(std::size_t i, std::size_t j) const;
  Tensor dense() const;
  std::size_t nnz() const noexcept { return values.size(); }
};

NormalizedAdjacency normalize(const SparseGraph& graph);

/// adj * x, differentiable with respect to x. The recorded backward rule
/// refers to `adj`, which must outlive any backward pass through the result.
Tensor spmm(const NormalizedAdjacency& adj, const Tensor& x);

enum class Activation { none, tanh, relu };

Tensor activate(Activation act, const Tensor& x);

/// activation(adj * x * weight + bias)
Tensor gcn_layer(const NormalizedAdjacency& adj, const Tensor& x, const Tensor& weight, const Tensor& bias,
                 Activation act);

}  // namespace gnsde
