#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "gnsde/graph.hpp"
#include "gnsde/latent.hpp"
#include "gnsde/tensor.hpp"

namespace gnsde {

enum class Split : std::uint8_t { none, train, val, test };

/// Node classification problem over a fixed graph.
struct NodeClassificationData {
  SparseGraph graph;
  Tensor features;  // [n x d]
  std::vector<int> labels;
  std::vector<Split> split;

  std::size_t num_nodes() const noexcept { return labels.size(); }
  std::size_t num_classes() const;
  /// 1 where split == s.
  std::vector<std::uint8_t> mask(Split s) const;
};

struct VotingConfig {
  std::size_t n = 300;
  double train_frac = 0.5;
  /// Probability that a sampled edge joins two voters of the same candidate.
  double homophily = 0.6;
  /// Per-axis spread of each candidate's cluster on the compass.
  double noise_sd = 0.8;
  double cluster_radius = 2.0;
  double mean_degree = 6.0;
  std::uint64_t seed = 0;
};

/// Three candidates, voters placed on a 2-D compass around the vertices of an
/// equilateral triangle and linked by a homophilous random graph. The first
/// round(train_frac * n) nodes of a seeded shuffle are train, the rest test.
NodeClassificationData gen_voting(const VotingConfig& config);

struct Observation {
  double time = 0.0;
  std::size_t node = 0;
  double value = 0.0;
  bool test = false;
};

/// Three nodes with edges C-A and C-B, each observed at irregular times.
struct TemporalRegressionData {
  SparseGraph graph;
  Tensor features;  // one-hot node identity, [3 x 3]
  std::vector<Observation> observations;  // sorted by time, then node
  double t_max = 12.0;

  static constexpr std::size_t node_a = 0;
  static constexpr std::size_t node_b = 1;
  static constexpr std::size_t node_c = 2;
};

/// Noise-free signals of the three-node task.
double three_node_a(double t);
double three_node_b(double t);
double three_node_c(double t);

/// True for times inside the interpolation window [4, 6] or the
/// extrapolation window [10, 12].
bool in_test_window(double t);

/// n_obs sorted Uniform[0, 12] timestamps, each observing all three nodes
/// with N(0, noise_sd^2) noise. Throws InvalidArgument when n_obs < 10.
TemporalRegressionData gen_three_node(std::size_t n_obs, std::uint64_t seed, double noise_sd = 0.5);

/// Snaps observations onto `grid`; `test` selects which flag to keep.
RegressionTargets regression_targets(const TemporalRegressionData& data, const TimeGrid& grid, bool test);

/// Reads `edges.txt` and `nodes.tsv` from `dir`. Each TSV row holds the
/// features, an integer label and an optional split tag (train, val, test).
/// Without tags the nodes are split 60/20/20 at random with `seed`.
NodeClassificationData load_planetoid(const std::filesystem::path& dir, std::uint64_t seed = 0);
void save_planetoid(const std::filesystem::path& dir, const NodeClassificationData& data);

/// Features plus i.i.d. N(0, sd^2) noise. Throws InvalidArgument when sd < 0.
NodeClassificationData add_feature_noise(const NodeClassificationData& data, double sd, std::uint64_t seed);

/// Targets for the nodes in `split`.
ClassTargets class_targets(const NodeClassificationData& data, Split split);

/// Uniform random permutation of [0, n) from the counter RNG.
std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed, std::uint64_t stream);

}  // namespace gnsde
