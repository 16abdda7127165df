#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "gnsde/graph.hpp"
#include "gnsde/latent.hpp"
#include "gnsde/model.hpp"
#include "gnsde/ops.hpp"
#include "gnsde/sde.hpp"
#include "gradcheck.hpp"

namespace gnsde::testing {

struct GradCase {
  std::string name;
  GradCheck result;
};

inline SparseGraph small_graph() {
  return SparseGraph(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0}, {0, 3}});
}

/// Moves every entry at least `gap` away from zero, keeping its sign, so
/// finite differences never straddle a kink.
inline Tensor away_from_zero(Tensor t, double gap = 0.2) {
  for (auto& v : t.mutable_data()) v = v < 0.0 ? v - gap : v + gap;
  return t;
}

inline ModelConfig small_model_config(ModelKind kind, LikelihoodKind likelihood) {
  ModelConfig c;
  c.kind = kind;
  c.input_dim = 3;
  c.latent_dim = 4;
  c.hidden_dim = 5;
  c.output_dim = likelihood == LikelihoodKind::categorical ? 3 : 1;
  c.likelihood = likelihood;
  c.init_seed = 11;
  return c;
}

/// Every differentiable op, composite layer and training objective, each
/// checked against central differences.
inline std::vector<GradCase> run_gradient_suite(double step = 1e-4) {
  std::mt19937_64 gen(2024);
  std::vector<GradCase> out;
  auto check = [&](std::string name, std::function<Tensor()> loss, std::vector<Tensor> inputs) {
    out.push_back({std::move(name), gradcheck(loss, std::move(inputs), step)});
  };

  auto a = random_tensor({3, 4}, gen);
  auto b = random_tensor({4, 2}, gen);
  auto c = random_tensor({3, 4}, gen);
  auto positive = random_tensor({3, 4}, gen, 0.5, 1.5);
  auto s = random_tensor({1}, gen);
  auto bias = random_tensor({4}, gen);
  auto side = random_tensor({3, 2}, gen);

  check("matmul", [=] { return probe_sum(matmul(a, b)); }, {a, b});
  check("add", [=] { return probe_sum(add(a, c)); }, {a, c});
  check("add_broadcast", [=] { return probe_sum(add(a, s)); }, {a, s});
  check("sub", [=] { return probe_sum(sub(a, c)); }, {a, c});
  check("mul", [=] { return probe_sum(mul(a, c)); }, {a, c});
  check("mul_broadcast", [=] { return probe_sum(mul(s, a)); }, {a, s});
  check("div", [=] { return probe_sum(div(a, positive)); }, {a, positive});
  check("scale", [=] { return probe_sum(scale(a, -2.5)); }, {a});
  check("add_scalar", [=] { return probe_sum(square(add_scalar(a, 0.3))); }, {a});
  check("tanh", [=] { return probe_sum(tanh(a)); }, {a});
  auto kinked = away_from_zero(random_tensor({3, 4}, gen));
  check("relu", [=] { return probe_sum(relu(kinked)); }, {kinked});
  check("exp", [=] { return probe_sum(exp(a)); }, {a});
  check("log", [=] { return probe_sum(log(positive)); }, {positive});
  check("square", [=] { return probe_sum(square(a)); }, {a});
  check("sum", [=] { return scale(sum(square(a)), 0.5); }, {a});
  check("mean", [=] { return mean(mul(a, c)); }, {a, c});
  check("add_row_bias", [=] { return probe_sum(add_row_bias(a, bias)); }, {a, bias});
  check("concat_cols", [=] { return probe_sum(concat_cols(a, side)); }, {a, side});
  check("append_constant_col", [=] { return probe_sum(tanh(append_constant_col(a, 0.7))); }, {a});
  check("gather", [=] {
    const std::vector<std::size_t> idx{0, 5, 5, 11};
    return probe_sum(gather(a, idx));
  }, {a});
  check("softmax_rows", [=] { return probe_sum(softmax_rows(a)); }, {a});
  check("cross_entropy", [=] {
    const std::vector<int> labels{0, 3, 1};
    const std::vector<std::uint8_t> mask{1, 0, 1};
    return cross_entropy(softmax_rows(a), labels, mask);
  }, {a});

  static const auto adj = normalize(small_graph());
  auto x = random_tensor({6, 3}, gen);
  auto w = random_tensor({3, 4}, gen);
  auto wb = random_tensor({4}, gen);
  check("spmm", [=] { return probe_sum(spmm(adj, x)); }, {x});
  check("gcn_layer_tanh", [=] { return probe_sum(gcn_layer(adj, x, w, wb, Activation::tanh)); }, {x, w, wb});
  check("gcn_layer_none", [=] { return probe_sum(gcn_layer(adj, x, w, wb, Activation::none)); }, {x, w, wb});
  auto z6 = random_tensor({6, 4}, gen);
  check("dropout", [=] { return probe_sum(apply_dropout(z6, 0.3, 5, 0)); }, {z6});

  // Solver building blocks with a small learned drift g(z) = tanh(z W).
  const TimeGrid grid(0.0, 1.0, 5);
  auto wz = random_tensor({4, 4}, gen, -0.5, 0.5);
  auto z0 = random_tensor({6, 4}, gen);
  const auto brownian = sample_brownian(grid, z0.shape(), 3);
  auto drift = [wz](const Tensor& z, double t) { return add_scalar(tanh(matmul(z, wz)), 0.1 * t); };
  auto prior = [](const Tensor& z, double) { return scale(z, -0.5); };
  auto sigma = [](const Tensor&, double) { return Tensor::scalar(0.8); };
  check("integrate_ode", [=] { return probe_sum(integrate_ode(z0, grid, drift).terminal()); }, {z0, wz});
  check("integrate_sde", [=] { return probe_sum(integrate_sde(z0, grid, drift, sigma, brownian).terminal()); },
        {z0, wz});
  check("kl_path_integral", [=] {
    auto path = integrate_sde(z0, grid, drift, sigma, brownian);
    return kl_path_integral(path, drift, prior, sigma);
  }, {z0, wz});

  // Full objectives on a fixed Brownian path.
  static const auto features = [] {
    std::mt19937_64 g(77);
    return random_tensor({6, 3}, g, -1.0, 1.0, false);
  }();
  const ClassTargets labels{{0, 1, 2, 0, 1, 2}, {1, 1, 0, 1, 0, 1}};
  auto objective_case = [&](std::string name, ModelKind kind, LikelihoodKind lik, Targets targets) {
    auto model = std::shared_ptr<NodeModel>(make_model(small_model_config(kind, lik)));
    std::vector<Tensor> params;
    for (auto& p : model->parameters()) params.push_back(p.value);
    check(std::move(name), [model, targets, grid] {
      SampleSpec spec;
      spec.seed = 13;
      return training_objective(*model, features, adj, targets, grid, spec).loss;
    }, params);
  };
  objective_case("elbo_classification", ModelKind::gnsde, LikelihoodKind::categorical, labels);
  RegressionTargets points;
  points.points = {{1, 0, 0.5}, {3, 2, -0.2}, {3, 4, 1.1}, {5, 1, 0.3}};
  objective_case("elbo_regression", ModelKind::gnsde, LikelihoodKind::gaussian, points);
  objective_case("gnode_objective", ModelKind::gnode, LikelihoodKind::categorical, labels);
  objective_case("gcn_objective", ModelKind::gcn, LikelihoodKind::categorical, labels);
  return out;
}

}  // namespace gnsde::testing
