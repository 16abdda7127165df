#include <doctest.h>

#include <cmath>
#include <vector>

#include "gnsde/error.hpp"
#include "gnsde/ops.hpp"
#include "gradient_suite.hpp"

using namespace gnsde;

TEST_CASE("reverse-mode gradients match central differences") {
  for (const auto& c : testing::run_gradient_suite()) {
    CAPTURE(c.name);
    CHECK(c.result.checked > 0);
    CHECK(c.result.worst_relative_error < 1e-3);
  }
}

TEST_CASE("matmul agrees with a hand-rolled triple loop") {
  auto a = Tensor::matrix({{1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}});
  auto b = Tensor::matrix({{0.5, -1.0, 2.0}, {1.5, 0.0, -0.5}});
  auto c = matmul(a, b);
  REQUIRE(c.shape() == Shape{3, 3});
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      double expected = 0.0;
      for (std::size_t k = 0; k < 2; ++k) expected += a.at(i, k) * b.at(k, j);
      CHECK(c.at(i, j) == expected);
    }
  }
  CHECK_THROWS_AS(matmul(a, a), DimensionError);
}

TEST_CASE("softmax rows are normalized and survive large logits") {
  auto x = Tensor::matrix({{1000.0, 999.0, 998.0}, {-5.0, 0.0, 5.0}, {0.0, 0.0, 0.0}});
  auto p = softmax_rows(x);
  for (std::size_t i = 0; i < 3; ++i) {
    double total = 0.0;
    for (std::size_t j = 0; j < 3; ++j) total += p.at(i, j);
    CHECK(std::abs(total - 1.0) < 1e-12);
  }
  const double denom = 1.0 + std::exp(-1.0) + std::exp(-2.0);
  CHECK(p.at(0, 0) == doctest::Approx(1.0 / denom).epsilon(1e-14));
  CHECK(p.at(2, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("cross entropy averages over masked nodes only") {
  auto probs = Tensor::matrix({{0.7, 0.2, 0.1}, {0.1, 0.1, 0.8}, {0.3, 0.3, 0.4}});
  const std::vector<int> labels{0, 2, 1};
  const std::vector<std::uint8_t> mask{1, 1, 0};
  CHECK(cross_entropy(probs, labels, mask).item() ==
        doctest::Approx(-(std::log(0.7) + std::log(0.8)) / 2.0));

  const std::vector<std::uint8_t> none{0, 0, 0};
  CHECK_THROWS_AS(cross_entropy(probs, labels, none), InvalidArgument);
  const std::vector<int> bad{0, 3, 1};
  CHECK_THROWS_AS(cross_entropy(probs, bad, mask), DomainError);
}

TEST_CASE("domain and shape errors") {
  auto x = Tensor::matrix({{1.0, 0.0}});
  CHECK_THROWS_AS(log(x), DomainError);
  CHECK_THROWS_AS(div(x, x), DomainError);
  CHECK_THROWS_AS(add(x, Tensor::zeros({2, 1})), DimensionError);
  CHECK_THROWS_AS(add_row_bias(x, Tensor::zeros({3})), DimensionError);
  CHECK_THROWS_AS(concat_cols(x, Tensor::zeros({2, 1})), DimensionError);
  const std::vector<std::size_t> idx{2};
  CHECK_THROWS_AS(gather(x, idx), DimensionError);
}

TEST_CASE("relu and broadcasting forward values") {
  auto x = Tensor::matrix({{-1.0, 2.0}, {0.5, -0.5}});
  auto r = relu(x);
  CHECK(r.at(0, 0) == 0.0);
  CHECK(r.at(0, 1) == 2.0);
  auto shifted = add(x, Tensor::scalar(1.0));
  CHECK(shifted.at(1, 1) == 0.5);
  auto row = add_row_bias(x, Tensor({2}, {10.0, 20.0}));
  CHECK(row.at(1, 0) == 10.5);
  CHECK(row.at(1, 1) == 19.5);
}
