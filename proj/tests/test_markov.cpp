#include <random>

#include "doctest.h"
#include "periodize/markov.hpp"

using namespace periodize;

namespace {

// Independent oracle: the lazy chain (I + P) / 2 is aperiodic with the same
// stationary law, so repeated squaring drives every row to it.
std::vector<double> lazy_power_stationary(const TransitionMatrix& p, int squarings) {
  const std::size_t n = p.size();
  std::vector<std::vector<double>> q(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) q[i][j] = 0.5 * p(i, j) + (i == j ? 0.5 : 0.0);
  for (int k = 0; k < squarings; ++k) {
    std::vector<std::vector<double>> r(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t l = 0; l < n; ++l)
        for (std::size_t j = 0; j < n; ++j) r[i][j] += q[i][l] * q[l][j];
    // Renormalise, or rounding in the row sums compounds over 2^k steps.
    for (auto& row : r) {
      double sum = 0.0;
      for (double v : row) sum += v;
      for (double& v : row) v /= sum;
    }
    q = r;
  }
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out[j] += q[i][j] / static_cast<double>(n);
  return out;
}

TransitionMatrix random_matrix(std::mt19937_64& rng, std::size_t n, double sparsity) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<double>> rows(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (unit(rng) < sparsity) continue;
      rows[i][j] = unit(rng);
      sum += rows[i][j];
    }
    if (sum == 0.0) {
      rows[i][(i + 1) % n] = 1.0;
      sum = 1.0;
    }
    for (double& v : rows[i]) v /= sum;
    // Re-close the row on its last nonzero entry so no spurious edge appears.
    std::size_t last = n - 1;
    while (rows[i][last] == 0.0) --last;
    double exact = 0.0;
    for (std::size_t j = 0; j < last; ++j) exact += rows[i][j];
    rows[i][last] = 1.0 - exact;
  }
  return TransitionMatrix::from_rows(rows);
}

}  // namespace

TEST_CASE("transition matrix validation") {
  CHECK_THROWS_AS(TransitionMatrix::from_rows({{0.5, 0.6}, {0.0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(TransitionMatrix::from_rows({{-0.1, 1.1}, {0.0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(TransitionMatrix::from_rows({{1.0}, {1.0}}), std::invalid_argument);
  CHECK_NOTHROW(TransitionMatrix::from_rows({{1.0 - 1e-13, 1e-13}, {0.3, 0.7}}));
  CHECK_THROWS_AS(Distribution({0.5, 0.4}), std::invalid_argument);
}

TEST_CASE("recurrent classes") {
  SUBCASE("two absorbing states") {
    const auto classes = recurrent_classes(TransitionMatrix::identity(2));
    REQUIRE(classes.size() == 2);
    CHECK(classes[0] == StateSet{0});
    CHECK(classes[1] == StateSet{1});
  }
  SUBCASE("irreducible two-state chain") {
    const auto classes = recurrent_classes(TransitionMatrix::from_rows({{0, 1}, {0.99, 0.01}}));
    REQUIRE(classes.size() == 1);
    CHECK(classes[0] == StateSet{0, 1});
  }
  SUBCASE("transient state feeding an absorbing one") {
    const auto classes = recurrent_classes(TransitionMatrix::from_rows({{0.5, 0.5}, {0, 1}}));
    REQUIRE(classes.size() == 1);
    CHECK(classes[0] == StateSet{1});
  }
}

TEST_CASE("is_unichain") {
  CHECK(is_unichain(TransitionMatrix::from_rows({{0, 1}, {0.7, 0.3}})));
  CHECK_FALSE(is_unichain(TransitionMatrix::identity(2)));
  CHECK(is_unichain(TransitionMatrix::identity(1)));
}

TEST_CASE("stationary distribution examples") {
  const auto uniform = stationary_distribution(TransitionMatrix::from_rows({{0.5, 0.5}, {0.5, 0.5}}));
  CHECK(uniform[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(uniform[1] == doctest::Approx(0.5).epsilon(1e-15));

  // Closed form (beta / (1 + beta), 1 / (1 + beta)) with beta = 0.99.
  const auto two = stationary_distribution(TransitionMatrix::from_rows({{0, 1}, {0.99, 0.01}}));
  CHECK(std::abs(two[0] - 0.99 / 1.99) < 1e-9);
  CHECK(std::abs(two[1] - 1.0 / 1.99) < 1e-9);
  CHECK(std::abs(two[0] - 0.49749) < 1e-5);

  try {
    stationary_distribution(TransitionMatrix::identity(2));
    FAIL("expected MultipleRecurrentClasses");
  } catch (const MultipleRecurrentClasses& e) {
    CHECK(e.classes().size() == 2);
  }
}

TEST_CASE("transient states get zero weight") {
  const auto p = TransitionMatrix::from_rows({{0.2, 0.3, 0.5}, {0.0, 0.4, 0.6}, {0.0, 0.9, 0.1}});
  const auto lambda = stationary_distribution(p);
  CHECK(lambda[0] == 0.0);
  CHECK(lambda[1] == doctest::Approx(0.9 / 1.5).epsilon(1e-12));
  CHECK(lambda.fixed_point_residual(p) < 1e-12);
}

TEST_CASE("two-state closed form over random rates") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.001, 1.0);
  for (int k = 0; k < 300; ++k) {
    const double a = unit(rng), b = unit(rng);
    const auto lambda = stationary_distribution(TransitionMatrix::from_rows({{1 - a, a}, {b, 1 - b}}));
    CHECK(std::abs(lambda[0] - b / (a + b)) < 1e-9);
    CHECK(std::abs(lambda[1] - a / (a + b)) < 1e-9);
  }
}

TEST_CASE("random unichain matrices match the lazy power oracle") {
  std::mt19937_64 rng(2024);
  int checked = 0;
  for (int k = 0; k < 400 && checked < 200; ++k) {
    const std::size_t n = 2 + static_cast<std::size_t>(k % 7);
    const auto p = random_matrix(rng, n, 0.5);
    if (!is_unichain(p)) continue;
    ++checked;
    const auto lambda = stationary_distribution(p);
    CHECK(lambda.fixed_point_residual(p) < 1e-12);
    const auto oracle = lazy_power_stationary(p, 60);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(lambda[i] - oracle[i]) < 1e-9);
  }
  CHECK(checked >= 200);
}
