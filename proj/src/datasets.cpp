#include "gnsde/datasets.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

#include "gnsde/error.hpp"
#include "gnsde/rng.hpp"

namespace gnsde {

namespace {

constexpr std::size_t kClasses = 3;

std::size_t uniform_index(std::size_t n, std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  auto k = static_cast<std::size_t>(rng::uniform(seed, stream, index) * static_cast<double>(n));
  return std::min(k, n - 1);
}

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

std::string_view split_name(Split s) {
  switch (s) {
    case Split::train:
      return "train";
    case Split::val:
      return "val";
    case Split::test:
      return "test";
    case Split::none:
      break;
  }
  return "";
}

}  // namespace

std::size_t NodeClassificationData::num_classes() const {
  int top = -1;
  for (int l : labels) top = std::max(top, l);
  return static_cast<std::size_t>(top + 1);
}

std::vector<std::uint8_t> NodeClassificationData::mask(Split s) const {
  std::vector<std::uint8_t> m(split.size());
  for (std::size_t i = 0; i < split.size(); ++i) m[i] = split[i] == s ? 1 : 0;
  return m;
}

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed, std::uint64_t stream) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    std::swap(idx[i - 1], idx[uniform_index(i, seed, stream, i)]);
  }
  return idx;
}

NodeClassificationData gen_voting(const VotingConfig& config) {
  const std::size_t n = config.n;
  if (n < 3) throw InvalidArgument("voting dataset needs at least 3 voters");
  if (!(config.train_frac > 0.0 && config.train_frac < 1.0)) throw InvalidArgument("train_frac must lie in (0, 1)");
  if (config.homophily < 0.0 || config.homophily > 1.0) throw InvalidArgument("homophily must lie in [0, 1]");
  if (config.noise_sd < 0.0) throw InvalidArgument("noise_sd must be non-negative");
  if (config.mean_degree < 0.0) throw InvalidArgument("mean_degree must be non-negative");
  const auto seed = config.seed;

  NodeClassificationData data;
  data.labels.resize(n);
  std::array<std::vector<std::size_t>, kClasses> members;
  for (std::size_t i = 0; i < n; ++i) {
    data.labels[i] = static_cast<int>(uniform_index(kClasses, seed, 1, i));
    members[static_cast<std::size_t>(data.labels[i])].push_back(i);
  }

  std::vector<double> x(n * 2);
  for (std::size_t i = 0; i < n; ++i) {
    const double angle = std::numbers::pi / 2 + 2 * std::numbers::pi * data.labels[i] / 3.0;
    x[2 * i] = config.cluster_radius * std::cos(angle) + config.noise_sd * rng::normal(seed, 2, 2 * i);
    x[2 * i + 1] = config.cluster_radius * std::sin(angle) + config.noise_sd * rng::normal(seed, 2, 2 * i + 1);
  }
  data.features = Tensor({n, 2}, std::move(x));

  // Each draw picks an endpoint, then a partner from its own class with
  // probability `homophily` and from the other classes otherwise.
  const auto target = static_cast<std::size_t>(std::llround(config.mean_degree * static_cast<double>(n) / 2.0));
  std::set<Edge> edges;
  std::vector<std::size_t> others;
  for (std::uint64_t draw = 0; edges.size() < target && draw < 50 * target + 100; ++draw) {
    const std::size_t u = uniform_index(n, seed, 3, 3 * draw);
    const auto cu = static_cast<std::size_t>(data.labels[u]);
    const bool same = rng::uniform(seed, 3, 3 * draw + 1) < config.homophily;
    std::size_t v;
    if (same) {
      const auto& pool = members[cu];
      if (pool.size() < 2) continue;
      v = pool[uniform_index(pool.size(), seed, 3, 3 * draw + 2)];
      if (v == u) continue;
    } else {
      const std::size_t others_count = n - members[cu].size();
      if (others_count == 0) continue;
      std::size_t k = uniform_index(others_count, seed, 3, 3 * draw + 2);
      v = 0;
      for (std::size_t c = 0; c < kClasses; ++c) {
        if (c == cu) continue;
        if (k < members[c].size()) {
          v = members[c][k];
          break;
        }
        k -= members[c].size();
      }
    }
    edges.insert({std::min(u, v), std::max(u, v)});
  }
  data.graph = SparseGraph(n, {edges.begin(), edges.end()});

  const auto n_train = static_cast<std::size_t>(std::llround(config.train_frac * static_cast<double>(n)));
  const auto order = shuffled_indices(n, seed, 4);
  data.split.assign(n, Split::test);
  for (std::size_t k = 0; k < n_train; ++k) data.split[order[k]] = Split::train;
  return data;
}

double three_node_a(double t) { return t * std::sin(std::numbers::pi * t / 2.0); }
double three_node_b(double t) { return 4.0 / (t / 5.0 + 0.5) * std::cos(std::numbers::pi * t / 2.0); }
double three_node_c(double t) { return three_node_a(t) + three_node_b(t); }

bool in_test_window(double t) { return (t >= 4.0 && t <= 6.0) || (t >= 10.0 && t <= 12.0); }

TemporalRegressionData gen_three_node(std::size_t n_obs, std::uint64_t seed, double noise_sd) {
  if (n_obs < 10) throw InvalidArgument("three-node task needs at least 10 observation times");
  if (noise_sd < 0.0) throw InvalidArgument("noise_sd must be non-negative");
  TemporalRegressionData data;
  data.graph = SparseGraph(3, {{TemporalRegressionData::node_a, TemporalRegressionData::node_c},
                               {TemporalRegressionData::node_b, TemporalRegressionData::node_c}});
  data.features = Tensor({3, 3}, {1, 0, 0, 0, 1, 0, 0, 0, 1});
  std::vector<double> times(n_obs);
  for (std::size_t k = 0; k < n_obs; ++k) times[k] = data.t_max * rng::uniform(seed, 10, k);
  std::sort(times.begin(), times.end());
  for (std::size_t k = 0; k < n_obs; ++k) {
    const double t = times[k];
    const double noise[3] = {noise_sd * rng::normal(seed, 11, 3 * k), noise_sd * rng::normal(seed, 11, 3 * k + 1),
                             noise_sd * rng::normal(seed, 11, 3 * k + 2)};
    const double a = three_node_a(t) + noise[0];
    const double b = three_node_b(t) + noise[1];
    // C is built from the noisy A and B plus its own noise.
    const double c = a + b + noise[2];
    const bool test = in_test_window(t);
    data.observations.push_back({t, TemporalRegressionData::node_a, a, test});
    data.observations.push_back({t, TemporalRegressionData::node_b, b, test});
    data.observations.push_back({t, TemporalRegressionData::node_c, c, test});
  }
  return data;
}

RegressionTargets regression_targets(const TemporalRegressionData& data, const TimeGrid& grid, bool test) {
  RegressionTargets out;
  for (const auto& o : data.observations) {
    if (o.test != test) continue;
    out.points.push_back({grid.nearest_index(o.time), o.node, o.value});
  }
  return out;
}

NodeClassificationData load_planetoid(const std::filesystem::path& dir, std::uint64_t seed) {
  using Kind = ParseError::Kind;
  const auto nodes_path = dir / "nodes.tsv";
  const auto edges_path = dir / "edges.txt";
  std::ifstream in(nodes_path);
  if (!in) throw ParseError(Kind::missing_file, nodes_path.string(), 0, "cannot open node table");
  if (!std::filesystem::exists(edges_path)) {
    throw ParseError(Kind::missing_file, edges_path.string(), 0, "cannot open edge list");
  }

  NodeClassificationData data;
  std::vector<double> features;
  std::size_t width = 0;
  bool any_tag = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto cols = split_tabs(line);
    Split tag = Split::none;
    if (cols.back() == "train" || cols.back() == "val" || cols.back() == "test") {
      tag = cols.back() == "train" ? Split::train : cols.back() == "val" ? Split::val : Split::test;
      any_tag = true;
      cols.pop_back();
    }
    if (cols.size() < 2) {
      if (cols.empty() || cols.back().empty()) {
        throw ParseError(Kind::missing_label, nodes_path.string(), lineno, "row has no label");
      }
      throw ParseError(Kind::malformed, nodes_path.string(), lineno, "row needs features and a label");
    }
    const std::string label = cols.back();
    cols.pop_back();
    if (label.empty()) throw ParseError(Kind::missing_label, nodes_path.string(), lineno, "empty label column");
    int value = 0;
    auto [ptr, ec] = std::from_chars(label.data(), label.data() + label.size(), value);
    if (ec != std::errc() || ptr != label.data() + label.size() || value < 0) {
      throw ParseError(Kind::malformed, nodes_path.string(), lineno, "bad label '" + label + "'");
    }
    if (width == 0) width = cols.size();
    if (cols.size() != width) {
      throw ParseError(Kind::malformed, nodes_path.string(), lineno,
                       "expected " + std::to_string(width) + " features, got " + std::to_string(cols.size()));
    }
    for (const auto& c : cols) {
      double f = 0.0;
      auto [fp, fec] = std::from_chars(c.data(), c.data() + c.size(), f);
      if (fec != std::errc() || fp != c.data() + c.size() || !std::isfinite(f)) {
        throw ParseError(Kind::malformed, nodes_path.string(), lineno, "bad feature '" + c + "'");
      }
      features.push_back(f);
    }
    data.labels.push_back(value);
    data.split.push_back(tag);
  }
  const std::size_t n = data.labels.size();
  if (n == 0) throw ParseError(Kind::malformed, nodes_path.string(), 0, "node table is empty");

  // An optional "# nodes N" header on the edge list must agree with the table.
  {
    std::ifstream edges_in(edges_path);
    std::string first;
    std::getline(edges_in, first);
    std::istringstream header(first);
    std::string hash, word;
    std::size_t declared = 0;
    if (header >> hash >> word >> declared && hash == "#" && word == "nodes" && declared != n) {
      throw ParseError(Kind::row_count_mismatch, nodes_path.string(), 0,
                       "edge list declares " + std::to_string(declared) + " nodes but table has " +
                           std::to_string(n) + " rows");
    }
  }
  data.graph = read_edge_list(edges_path, n);
  data.features = Tensor({n, width}, std::move(features));

  if (!any_tag) {
    const auto order = shuffled_indices(n, seed, 5);
    const auto n_train = static_cast<std::size_t>(std::llround(0.6 * static_cast<double>(n)));
    const auto n_val = static_cast<std::size_t>(std::llround(0.2 * static_cast<double>(n)));
    for (std::size_t k = 0; k < n; ++k) {
      data.split[order[k]] = k < n_train ? Split::train : k < n_train + n_val ? Split::val : Split::test;
    }
  }
  return data;
}

void save_planetoid(const std::filesystem::path& dir, const NodeClassificationData& data) {
  std::filesystem::create_directories(dir);
  write_edge_list(dir / "edges.txt", data.graph);
  std::ofstream out(dir / "nodes.tsv");
  if (!out) throw Error("cannot write " + (dir / "nodes.tsv").string());
  const std::size_t d = data.features.cols();
  auto x = data.features.data();
  for (std::size_t i = 0; i < data.num_nodes(); ++i) {
    for (std::size_t j = 0; j < d; ++j) out << format_double(x[i * d + j]) << '\t';
    out << data.labels[i];
    if (data.split[i] != Split::none) out << '\t' << split_name(data.split[i]);
    out << '\n';
  }
}

NodeClassificationData add_feature_noise(const NodeClassificationData& data, double sd, std::uint64_t seed) {
  if (sd < 0.0) throw InvalidArgument("noise sd must be non-negative");
  NodeClassificationData out = data;
  if (sd == 0.0) return out;
  std::vector<double> x(data.features.data().begin(), data.features.data().end());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += sd * rng::normal(seed, 6, i);
  out.features = Tensor(data.features.shape(), std::move(x));
  return out;
}

ClassTargets class_targets(const NodeClassificationData& data, Split split) {
  return {data.labels, data.mask(split)};
}

}  // namespace gnsde
