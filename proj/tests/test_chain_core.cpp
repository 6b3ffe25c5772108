#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "crested/chain.hpp"
#include "crested/errors.hpp"
#include "crested/matrix.hpp"
#include "crested/oracle.hpp"
#include "crested/random_specs.hpp"

using namespace crested;

namespace {

WeightedGraph path_graph(const Vec& edge_weights) {
  const std::size_t n = edge_weights.size() + 1;
  Matrix w(n, n);
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = std::to_string(i);
  for (std::size_t e = 0; e < edge_weights.size(); ++e)
    w(e, e + 1) = w(e + 1, e) = edge_weights[e];
  return {labels, w};
}

ReversibleChain directed_3cycle() {
  Matrix p(3, 3);
  p(0, 1) = p(1, 2) = p(2, 0) = 1.0;
  return {{"0", "1", "2"}, p, Vec(3, 1.0 / 3.0)};
}

}  // namespace

TEST_CASE("random walk on K2") {
  const ReversibleChain c = chain_from_weights(path_graph({1.0}));
  CHECK(c.P(0, 0) == 0.0);
  CHECK(c.P(0, 1) == 1.0);
  CHECK(c.P(1, 0) == 1.0);
  CHECK(c.pi[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(c.pi[1] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("random walk on the path 0-1-2") {
  const ReversibleChain c = chain_from_weights(path_graph({1.0, 1.0}));
  CHECK(c.pi[0] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(c.pi[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(c.pi[2] == doctest::Approx(0.25).epsilon(1e-15));
  validate_chain(c);
}

TEST_CASE("weight round trip recovers the graph up to global scale") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const int m = 2 + static_cast<int>(seed % 5);
    const ReversibleChain c = random_reversible_chain(seed, m);
    const WeightedGraph g = weights_from_chain(c);
    const ReversibleChain back = chain_from_weights(g);
    CHECK(max_abs_diff(back.P, c.P) < 1e-12);
    CHECK(max_abs_diff(back.pi, c.pi) < 1e-12);
  }
}

TEST_CASE("weights from the swap chain and from J_m") {
  Matrix swap(2, 2);
  swap(0, 1) = swap(1, 0) = 1.0;
  const WeightedGraph g = weights_from_chain({{"0", "1"}, swap, Vec(2, 0.5)});
  CHECK(g.w(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(g.w(1, 0) == doctest::Approx(0.5).epsilon(1e-15));

  const int m = 5;
  const WeightedGraph gu = weights_from_chain(uniform_chain(m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) CHECK(gu.w(i, j) == doctest::Approx(1.0 / 25.0).epsilon(1e-14));
}

TEST_CASE("non-reversible chain is rejected by weights_from_chain") {
  CHECK_THROWS_AS(weights_from_chain(directed_3cycle()), ModelError);
}

TEST_CASE("detailed balance checks") {
  CHECK(check_detailed_balance(Matrix::uniform(4), Vec(4, 0.25)));
  const ReversibleChain bd = chain_from_weights(path_graph({0.3, 1.7, 0.4}));
  CHECK(check_detailed_balance(bd.P, bd.pi));
  CHECK_FALSE(check_detailed_balance(directed_3cycle().P, Vec(3, 1.0 / 3.0)));
  CHECK_THROWS_AS(check_detailed_balance(Matrix::uniform(3), Vec(4, 0.25)), InputError);
}

TEST_CASE("k-step probability against matrix powers") {
  const ReversibleChain c = random_reversible_chain(42, 4);
  const SpectralData s = numeric_spectrum(c);

  for (std::size_t x = 0; x < 4; ++x)
    for (std::size_t y = 0; y < 4; ++y) {
      CHECK(std::fabs(kstep_probability(s, 0, x, y) - (x == y ? 1.0 : 0.0)) < 1e-10);
      CHECK(std::fabs(kstep_probability(s, 1, x, y) - c.P(x, y)) < 1e-10);
    }
  const Matrix p5 = matrix_power(c.P, 5);
  for (std::size_t x = 0; x < 4; ++x)
    for (std::size_t y = 0; y < 4; ++y)
      CHECK(std::fabs(kstep_probability(s, 5, x, y) - p5(x, y)) < 1e-10);
}

TEST_CASE("k-step rows sum to one for k up to 50") {
  const ReversibleChain c = random_reversible_chain(7, 6);
  const SpectralData s = numeric_spectrum(c);
  for (unsigned k = 0; k <= 50; ++k) {
    double sum = 0.0;
    for (std::size_t y = 0; y < 6; ++y) sum += kstep_probability(s, k, 2, y);
    CHECK(std::fabs(sum - 1.0) < 1e-9);
  }
}

TEST_CASE("unknown state label") {
  const ReversibleChain c = uniform_chain(3);
  CHECK_THROWS_AS(c.index_of("nope"), UnknownStateError);
  const SpectralData s = numeric_spectrum(c);
  CHECK_THROWS_AS(kstep_probability(s, 1, 0, 9), UnknownStateError);
}

TEST_CASE("ergodicity classification") {
  CHECK(classify_ergodicity(numeric_spectrum(uniform_chain(2))) == Ergodicity::Ergodic);

  Matrix swap(2, 2);
  swap(0, 1) = swap(1, 0) = 1.0;
  CHECK(classify_ergodicity(numeric_spectrum({{"0", "1"}, swap, Vec(2, 0.5)})) ==
        Ergodicity::Periodic);

  Matrix block(4, 4);
  for (int b = 0; b < 2; ++b)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) block(2 * b + i, 2 * b + j) = 0.5;
  CHECK(classify_ergodicity(numeric_spectrum({{"0", "1", "2", "3"}, block, Vec(4, 0.25)})) ==
        Ergodicity::Reducible);
}

TEST_CASE("eigenvalue-1 multiplicity equals component count") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    // two disjoint random graphs glued into one chain
    const ReversibleChain a = random_reversible_chain(seed, 3);
    const ReversibleChain b = random_reversible_chain(seed + 100, 4);
    const std::size_t n = 7;
    Matrix p(n, n);
    Vec pi(n);
    std::vector<std::string> labels(n);
    for (std::size_t i = 0; i < 3; ++i) {
      labels[i] = "a" + std::to_string(i);
      pi[i] = 0.5 * a.pi[i];
      for (std::size_t j = 0; j < 3; ++j) p(i, j) = a.P(i, j);
    }
    for (std::size_t i = 0; i < 4; ++i) {
      labels[3 + i] = "b" + std::to_string(i);
      pi[3 + i] = 0.5 * b.pi[i];
      for (std::size_t j = 0; j < 4; ++j) p(3 + i, 3 + j) = b.P(i, j);
    }
    const ReversibleChain glued{labels, p, pi};
    const WeightedGraph g = weights_from_chain(glued);
    const SpectralData s = numeric_spectrum(glued);
    const auto clusters = cluster_eigenvalues(s.lambdas);
    CHECK(clusters[0].multiplicity == count_components(g));
    CHECK(count_components(g) == 2);
  }
}

TEST_CASE("constructed chains satisfy the core invariants") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const ReversibleChain c = random_reversible_chain(seed, 2 + static_cast<int>(seed % 6));
    for (std::size_t i = 0; i < c.size(); ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < c.size(); ++j) row += c.P(i, j);
      CHECK(std::fabs(row - 1.0) < 1e-12);
    }
    CHECK(detailed_balance_residual(c.P, c.pi) < 1e-10);
    const SpectralData s = numeric_spectrum(c);
    CHECK(eigen_equation_residual(c.P, s) < 1e-9);
    CHECK(orthonormality_residual(s) < 1e-9);
  }
}

TEST_CASE("chain validation rejects malformed input") {
  Matrix p(2, 2);
  p(0, 0) = 0.6;
  p(0, 1) = 0.6;  // row sums to 1.2
  p(1, 0) = 0.5;
  p(1, 1) = 0.5;
  CHECK_THROWS_AS(make_chain({"0", "1"}, p, Vec(2, 0.5)), InputError);
  CHECK_THROWS_AS(make_chain({"0", "1"}, Matrix::uniform(2), Vec{0.9, 0.0}), ModelError);
}
