#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "crested/errors.hpp"
#include "crested/insect.hpp"
#include "crested/oracle.hpp"
#include "crested/rng.hpp"
#include "crested/util.hpp"

using namespace crested;

namespace {

TreeShape random_shape(std::uint64_t seed, int max_depth, int max_degree) {
  SplitMix64 rng = substream(seed, 0x734EULL);
  const int n = 1 + rng.below(max_depth);
  std::vector<int> m(n);
  for (int i = 0; i < n; ++i) m[i] = 2 + rng.below(max_degree - 1);
  return {m};
}

}  // namespace

TEST_CASE("alpha boundary values and the first step") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const TreeShape shape = random_shape(seed, 5, 5);
    const Vec alpha = compute_alphas(shape);
    const int n = shape.depth();
    CHECK(alpha[0] == 1.0);
    CHECK(alpha[n] == 0.0);
    if (n >= 2)
      CHECK(alpha[1] == doctest::Approx(1.0 / (shape.branching[n - 1] + 1)).epsilon(1e-15));
  }
}

TEST_CASE("alpha values for the binary tree of depth two") {
  const Vec alpha = compute_alphas({{2, 2}});
  REQUIRE(alpha.size() == 3);
  CHECK(alpha[0] == 1.0);
  CHECK(alpha[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(alpha[2] == 0.0);
}

TEST_CASE("closed form equals the recursion on 200 random shapes") {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const TreeShape shape = random_shape(seed, 6, 6);
    CHECK(max_abs_diff(compute_alphas(shape), compute_alphas_recursive(shape)) < 1e-13);
  }
}

TEST_CASE("kernel of the (2,2) tree") {
  const Vec f = insect_kernel_by_distance({{2, 2}});
  CHECK(f[2] == doctest::Approx(1.0 / 12.0).epsilon(1e-15));  // alpha_1 / (m1 m2)
  CHECK(f[0] == f[1]);                                        // returning equals distance one
  CHECK(f[0] == doctest::Approx(5.0 / 12.0).epsilon(1e-15));
}

TEST_CASE("kernel rows sum to one and the chain is uniform-reversible") {
  for (const TreeShape& shape : {TreeShape{{2, 2}}, TreeShape{{3, 2, 2}}, TreeShape{{2, 3, 4}}}) {
    const ReversibleChain c = insect_kernel(shape);
    for (std::size_t i = 0; i < c.size(); ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < c.size(); ++j) row += c.P(i, j);
      CHECK(std::fabs(row - 1.0) < 1e-12);
    }
    validate_chain(c);
    CHECK(c.pi[0] == doctest::Approx(1.0 / c.size()).epsilon(1e-15));
  }
}

TEST_CASE("kernel is invariant under random tree automorphisms") {
  const TreeShape shape{{2, 3, 2}};
  const ReversibleChain c = insect_kernel(shape);
  const MixedRadix mr{shape.branching};
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto g = random_tree_automorphism(shape, seed);
    for (std::size_t x = 0; x < c.size(); ++x)
      for (std::size_t y = 0; y < c.size(); ++y) {
        CHECK(c.P(g[x], g[y]) == c.P(x, y));
        const auto wx = mr.word(x), wy = mr.word(y), gx = mr.word(g[x]), gy = mr.word(g[y]);
        CHECK(ultrametric_distance(wx, wy) == ultrametric_distance(gx, gy));
      }
  }
}

TEST_CASE("nested weights for the (2,2) tree") {
  const CrestedSpec spec = insect_as_nested({{2, 2}});
  REQUIRE(spec.weights.size() == 2);
  CHECK(spec.weights[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(spec.weights[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("nested weights telescope to one") {
  for (const TreeShape& shape : {TreeShape{{3, 2, 2}}, TreeShape{{2, 3, 4}}}) {
    const CrestedSpec spec = insect_as_nested(shape);
    double sum = 0.0;
    for (double w : spec.weights) sum += w;
    CHECK(std::fabs(sum - 1.0) < 1e-14);
  }
}

TEST_CASE("nested product equals the distance kernel entrywise") {
  for (const TreeShape& shape : {TreeShape{{2, 2}}, TreeShape{{3, 2, 2}}, TreeShape{{2, 3, 4}}}) {
    const ReversibleChain kernel = insect_kernel(shape);
    const ReversibleChain nested = assemble_first_crested(insect_as_nested(shape));
    CHECK(max_abs_diff(kernel.P, nested.P) < 1e-13);
    CHECK(max_abs_diff(kernel.pi, nested.pi) < 1e-15);
  }
}

TEST_CASE("insect spectrum of the (2,2) tree") {
  const auto zs = insect_spectrum({{2, 2}});
  REQUIRE(zs.size() == 3);
  CHECK(zs[0].eigenvalue == 1.0);
  CHECK(zs[0].dimension == 1);
  CHECK(zs[1].eigenvalue == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(zs[1].dimension == 1);
  CHECK(zs[2].eigenvalue == 0.0);
  CHECK(zs[2].dimension == 2);
  CHECK(compare_spectra(zs, numeric_spectrum(insect_kernel({{2, 2}}))).pass);
}

TEST_CASE("insect eigenspace dimensions for the (3,2,2) tree") {
  const auto zs = insect_spectrum({{3, 2, 2}});
  REQUIRE(zs.size() == 4);
  CHECK(zs[0].dimension == 1);
  CHECK(zs[1].dimension == 2);  // m1 - 1
  CHECK(zs[2].dimension == 3);  // m1 (m2 - 1)
  CHECK(zs[3].dimension == 6);  // m1 m2 (m3 - 1)
  long long total = 0;
  for (const auto& z : zs) total += z.dimension;
  CHECK(total == 12);
  CHECK(zs.back().eigenvalue == 0.0);
  CHECK(compare_spectra(zs, numeric_spectrum(insect_kernel({{3, 2, 2}}))).pass);
}

TEST_CASE("weight tail sums reproduce the alpha products") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const TreeShape shape = random_shape(seed, 5, 4);
    const int n = shape.depth();
    const CrestedSpec spec = insect_as_nested(shape);
    const Vec alpha = compute_alphas(shape);
    for (int j = 1; j <= n - 1; ++j) {
      double tail = 0.0;
      for (int i = n - j + 1; i <= n; ++i) tail += spec.weights[i - 1];
      double aprod = 1.0;
      for (int t = 1; t <= j; ++t) aprod *= alpha[t];
      CHECK(std::fabs(tail - (1.0 - aprod)) < 1e-13);
    }
  }
}

TEST_CASE("insect spectrum agrees with the nested-product decomposition") {
  const TreeShape shape{{2, 3, 2}};
  const CrestedSpec spec = insect_as_nested(shape);
  const auto spectra = factor_spectra(spec);
  const auto nested = analytic_spectrum_first(spec, spectra);
  const auto zs = insect_spectrum(shape);
  // same multiset of (eigenvalue, dimension)
  const OracleReport r = compare_spectra(zs, numeric_spectrum(assemble_first_crested(spec)));
  CHECK(r.pass);
  long long nested_total = 0;
  for (const auto& d : nested) nested_total += d.dimension;
  CHECK(nested_total == shape.leaf_count());
}

TEST_CASE("ehrenfest preset spectra") {
  SUBCASE("three balls, two urns") {
    const CrestedSpec spec = ehrenfest_preset(3, 2);
    const auto spectra = factor_spectra(spec);
    const auto descriptors = analytic_spectrum_first(spec, spectra, true);
    const OracleReport r =
        compare_spectra(descriptors, numeric_spectrum(assemble_first_crested(spec)));
    REQUIRE(r.pass);
    REQUIRE(r.claimed.size() == 4);
    for (int j = 0; j <= 3; ++j) {
      CHECK(r.claimed[j].first == doctest::Approx((3.0 - j) / 3.0).epsilon(1e-12));
      CHECK(r.claimed[j].second == binomial(3, j));
    }
  }
  SUBCASE("one ball is the uniform chain itself") {
    const ReversibleChain chain = assemble_first_crested(ehrenfest_preset(1, 4));
    CHECK(max_abs_diff(chain.P, Matrix::uniform(4)) == 0.0);
  }
  SUBCASE("two balls, three urns") {
    const CrestedSpec spec = ehrenfest_preset(2, 3);
    const OracleReport r =
        compare_spectra(analytic_spectrum_first(spec, factor_spectra(spec)),
                        numeric_spectrum(assemble_first_crested(spec)));
    REQUIRE(r.pass);
    REQUIRE(r.claimed.size() == 3);
    CHECK(r.claimed[0].second == 1);
    CHECK(r.claimed[1].first == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.claimed[1].second == 4);
    CHECK(r.claimed[2].second == 4);
  }
}

TEST_CASE("excursion Monte Carlo matches the closed-form kernel") {
  const TreeShape shape{{2, 2}};
  const ReversibleChain kernel = insect_kernel(shape);
  const long long excursions = 200000;
  const Matrix freq = insect_excursion_frequencies(shape, excursions, 424242);
  for (std::size_t x = 0; x < 4; ++x)
    for (std::size_t y = 0; y < 4; ++y) {
      const double p = kernel.P(x, y);
      const double se = std::sqrt(p * (1.0 - p) / excursions);
      CHECK(std::fabs(freq(x, y) - p) < 4.0 * se);
    }
}

TEST_CASE("shape validation") {
  CHECK_THROWS_AS(validate_shape({{1, 2}}), InputError);
  CHECK_THROWS_AS(validate_shape({{}}), InputError);
  CHECK_THROWS_AS(ehrenfest_preset(0, 2), InputError);
  CHECK_THROWS_AS(ehrenfest_preset(2, 1), InputError);
}
