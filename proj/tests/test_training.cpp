#include <doctest.h>

#include <cmath>

#include "gnsde/baselines.hpp"
#include "gnsde/error.hpp"
#include "gnsde/ops.hpp"
#include "gnsde/optim.hpp"
#include "gnsde/train.hpp"
#include "gradient_suite.hpp"

using namespace gnsde;
using testing::small_model_config;

namespace {

const NormalizedAdjacency& adjacency() {
  static const auto adj = normalize(testing::small_graph());
  return adj;
}

Tensor features() {
  std::mt19937_64 gen(1);
  return testing::random_tensor({6, 3}, gen, -1.0, 1.0, false);
}

const ClassTargets kTargets{{0, 1, 2, 0, 1, 2}, {1, 1, 1, 1, 1, 1}};

}  // namespace

TEST_CASE("adam's first step moves each weight by lr against its gradient sign") {
  ParameterList params;
  auto& w = params.add("w", Tensor({3}, {1.0, -2.0, 0.5}, true));
  Adam adam(params, {.lr = 0.1});
  backward(sum(mul(w, Tensor({3}, {2.0, -4.0, 0.0}))));
  adam.step();
  CHECK(w[0] == doctest::Approx(0.9));
  CHECK(w[1] == doctest::Approx(-1.9));
  CHECK(w[2] == 0.5);
  CHECK(adam.steps_taken() == 1);

  ParameterList empty;
  empty.add("u", Tensor::scalar(0.0, true));
  Adam idle(empty);
  CHECK_THROWS_AS(idle.step(), InvalidArgument);
}

TEST_CASE("parameter list rejects duplicates and unknown names") {
  ParameterList params;
  params.add("a", Tensor::scalar(1.0, true));
  CHECK_THROWS_AS(params.add("a", Tensor::scalar(2.0, true)), InvalidArgument);
  CHECK_THROWS_AS(params.get("b"), InvalidArgument);
  CHECK(params.total_elements() == 1);
}

TEST_CASE("training lowers the negative ELBO") {
  // Labels are the argmax feature, so the task is learnable.
  auto x = features();
  ClassTargets targets{std::vector<int>(6), std::vector<std::uint8_t>(6, 1)};
  for (std::size_t i = 0; i < 6; ++i) {
    int best = 0;
    for (int k = 1; k < 3; ++k) best = x.at(i, k) > x.at(i, best) ? k : best;
    targets.labels[i] = best;
  }
  auto config = small_model_config(ModelKind::gnsde, LikelihoodKind::categorical);
  config.encoder = EncoderKind::linear;
  config.diffusion = 0.3;
  LatentGnsde model(config);
  TrainConfig tc;
  tc.epochs = 60;
  tc.seed = 5;
  tc.adam.lr = 0.05;
  auto trace = train(model, x, adjacency(), targets, TimeGrid(0.0, 1.0, 5), tc);
  REQUIRE(trace.size() == 60);
  double early = 0.0, late = 0.0;
  for (std::size_t i = 0; i < 5; ++i) {
    early += trace[i].loss;
    late += trace[55 + i].loss;
  }
  CHECK(late < 0.3 * early);
  CHECK(trace.back().epoch == 59);
}

TEST_CASE("resuming a trainer continues the same trajectory") {
  const TimeGrid grid(0.0, 1.0, 4);
  TrainConfig config;
  config.seed = 3;
  LatentGnsde split_run(small_model_config(ModelKind::gnsde, LikelihoodKind::categorical));
  Trainer trainer(split_run, config);
  trainer.run(features(), adjacency(), kTargets, grid, 4);
  auto tail = trainer.run(features(), adjacency(), kTargets, grid, 3);
  CHECK(trainer.epochs_done() == 7);

  LatentGnsde whole(small_model_config(ModelKind::gnsde, LikelihoodKind::categorical));
  Trainer once(whole, config);
  auto full = once.run(features(), adjacency(), kTargets, grid, 7);
  CHECK(tail.back().loss == full.back().loss);
  CHECK(std::ranges::equal(split_run.parameters().get("drift.0.weight").data(),
                           whole.parameters().get("drift.0.weight").data()));
}

TEST_CASE("equal seeds give identical training traces") {
  auto run = [] {
    auto config = small_model_config(ModelKind::gnode, LikelihoodKind::categorical);
    config.dropout = 0.2;
    GnOdeModel model(config);
    TrainConfig tc;
    tc.epochs = 5;
    tc.seed = 8;
    return train(model, features(), adjacency(), kTargets, TimeGrid(0.0, 1.0, 3), tc);
  };
  auto a = run(), b = run();
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].loss == b[i].loss);
}

TEST_CASE("a non-finite loss reports the diverging epoch") {
  GnOdeModel model(small_model_config(ModelKind::gnode, LikelihoodKind::gaussian));
  RegressionTargets huge;
  huge.points = {{2, 0, 1e200}};
  TrainConfig config;
  config.epochs = 3;
  try {
    train(model, features(), adjacency(), huge, TimeGrid(0.0, 1.0, 2), config);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.epoch() == 0);
  }
}
