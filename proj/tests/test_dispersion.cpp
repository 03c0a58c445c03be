#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "vplab/dispersion.hpp"
#include "vplab/quadrature.hpp"

using namespace vplab;
using std::numbers::pi;

namespace {

DispersionFunction maxwell(double k) { return DispersionFunction(EquilibriumSpec::maxwellian_1d(), {k}); }

bool has_root(const RootSearchResult& r, complex w, double tol) {
  for (const auto& x : r.roots)
    if (std::abs(x.omega - w) <= tol) return true;
  return false;
}

} // namespace

// Reference values from the closed form
//   D_k(z) = 1 + sqrt(2pi)/k^2 (1 + i z/(k sqrt2) sqrt(pi) w(z/(k sqrt2)))
// for f = e^{-v^2/2}, with w the Faddeeva function (scipy.special.wofz).
struct FaddeevaCase {
  double k;
  complex z;
  complex d;
};

class DispersionFaddeeva : public ::testing::TestWithParam<FaddeevaCase> {};

TEST_P(DispersionFaddeeva, MatchesClosedForm) {
  const auto c = GetParam();
  const complex got = eval_D(maxwell(c.k), c.z);
  EXPECT_LE(std::abs(got - c.d), 1e-10 * std::max(1.0, std::abs(c.d))) << got;
}

INSTANTIATE_TEST_SUITE_P(
    Maxwellian, DispersionFaddeeva,
    ::testing::Values(FaddeevaCase{1, {1.0, 1.0}, {1.4774488130486634, 0.58203755646459887}},
                      FaddeevaCase{1, {0.5, -0.3}, {3.7017229508115514, 2.2351596439094314}},
                      FaddeevaCase{2, {3.0, -1.0}, {0.63660604833602807, 0.59032832430072546}},
                      FaddeevaCase{0.5, {1.4, -0.2}, {-1.711111781477741, -0.24008179101956148}},
                      FaddeevaCase{1, {-2.0, -1.5}, {-3.5776781525490149, 5.0030410628695359}},
                      FaddeevaCase{3, {4.8, -4.0}, {0.042747735779684604, 0.078860723616498624}}));

TEST(Dispersion, NormalizedMaxwellian2D) {
  const auto eq = EquilibriumSpec::normalized_maxwellian_2d();
  // Same closed form with the marginal amplitude 1/sqrt(2pi); direction of k
  // does not matter for an isotropic equilibrium.
  DispersionFunction a(eq, {0.1, 0.1}), b(eq, {0.3 * std::sqrt(2.0), 0.0});
  EXPECT_LE(std::abs(eval_D(a, {1.0, -0.1}) - complex(-0.030165438700500147, -0.2229098459888057)), 1e-10);
  EXPECT_LE(std::abs(eval_D(b, {1.3, -0.08}) - complex(-0.035656874937352256, 0.025481061129932925)), 1e-10);
}

TEST(Dispersion, ScaledGaussianTerm) {
  DispersionFunction d(EquilibriumSpec{{GaussianTerm{0.7, {1.3}}}}, {1.5});
  EXPECT_LE(std::abs(eval_D(d, {1.0, -0.5}) - complex(1.6041428682315551, 0.50678185450079849)), 1e-10);
}

// Independent oracle: composite Gauss-Legendre on the real t axis with 4x
// the nodes, upper half plane only (the integrand decays there).
TEST(Dispersion, IndependentQuadratureOracle) {
  const complex z{1.0, 1.0};
  auto f = [&](double t) { return std::sqrt(2 * pi) * t * std::exp(-t * t / 2) * std::exp(complex(0, 1) * z * t); };
  const complex ref = 1.0 + quadrature::composite(quadrature::gauss_legendre(80), f, 0.0, 40.0, 160);
  EXPECT_LE(std::abs(eval_D(maxwell(1), z) - ref), 1e-10 * std::abs(ref));
}

TEST(Dispersion, KnownRootIsAZero) {
  EXPECT_LE(std::abs(eval_D(maxwell(1), {2.511728081, -0.4796966410})), 1e-6);
}

TEST(Dispersion, DecaysUpTheImaginaryAxis) {
  EXPECT_LT(std::abs(eval_D(maxwell(1), {0.0, 100.0}) - 1.0), 0.05);
}

TEST(Dispersion, DerivativeMatchesFiniteDifference) {
  const auto d = maxwell(1);
  const complex z{1.0, 1.0};
  const double h = 1e-5;
  const complex fd = (eval_D(d, z + h) - eval_D(d, z - h)) / (2 * h);
  EXPECT_LE(std::abs(fd - eval_D_prime(d, z)), 1e-6);
  EXPECT_GT(std::abs(eval_D_prime(d, {2.511728081, -0.4796966410})), 1e-3);
}

TEST(Dispersion, DerivativeIsLinearInTheEquilibrium) {
  const GaussianTerm a{1.0, {1.0}}, b{0.3, {2.0}};
  const complex z{1.2, -0.4};
  const complex sum = eval_D_prime(DispersionFunction(EquilibriumSpec{{a, b}}, {1.0}), z);
  const complex parts = eval_D_prime(DispersionFunction(EquilibriumSpec{{a}}, {1.0}), z) +
                        eval_D_prime(DispersionFunction(EquilibriumSpec{{b}}, {1.0}), z);
  EXPECT_LE(std::abs(sum - parts), 1e-12 * std::abs(sum));
}

TEST(CountZeros, KnownBoxes) {
  const auto d = maxwell(1);
  const int n = count_zeros(d, SearchBox{-8, 8, -8, 8});
  EXPECT_GE(n, 6);
  EXPECT_EQ(count_zeros(d, SearchBox{-8, 8, 0.01, 8}), 0);
  EXPECT_EQ(count_zeros(d, SearchBox{2, 3, -1, 0}), 1);
  const auto r = find_roots(d, SearchBox{-8, 8, -8, 8});
  int mult = 0;
  for (const auto& x : r.roots) mult += x.multiplicity;
  EXPECT_EQ(mult, n);
  EXPECT_TRUE(r.unresolved.empty());
}

// Cross-checked offline: argument principle on wofz gives 36 zeros.
TEST(CountZeros, SmallWavenumberBox) {
  EXPECT_EQ(count_zeros(maxwell(0.1), SearchBox{-4, 4, -1, 0.5}), 36);
}

TEST(FindRoots, Maxwellian1D) {
  const double tol = 1e-6;
  const auto r1 = find_roots(maxwell(1), SearchBox{});
  EXPECT_TRUE(has_root(r1, {2.511728081, -0.4796966410}, tol));
  EXPECT_TRUE(has_root(r1, {-2.511728081, -0.4796966410}, tol));
  EXPECT_TRUE(has_root(r1, {3.498058625, -2.374303389}, tol));
  EXPECT_TRUE(has_root(r1, {-3.498058625, -2.374303389}, tol));
  const auto r2 = find_roots(maxwell(2), SearchBox{});
  EXPECT_TRUE(has_root(r2, {3.734976684, -2.087460944}, tol));
  EXPECT_TRUE(has_root(r2, {-3.734976684, -2.087460944}, tol));
  const auto r3 = find_roots(maxwell(3), SearchBox{});
  EXPECT_TRUE(has_root(r3, {4.866872949, -4.113005968}, tol));
  EXPECT_TRUE(has_root(r3, {-4.866872949, -4.113005968}, tol));
}

TEST(FindRoots, SortedByImaginaryPartAndSymmetric) {
  const auto r = find_roots(maxwell(2), SearchBox{});
  for (std::size_t i = 1; i < r.roots.size(); ++i)
    EXPECT_GE(r.roots[i - 1].omega.imag(), r.roots[i].omega.imag() - 1e-8);
  for (const auto& x : r.roots) EXPECT_TRUE(has_root(r, -std::conj(x.omega), 1e-8));
}

TEST(FindRoots, BoxValidation) {
  EXPECT_THROW(find_roots(maxwell(1), SearchBox{3, 2, -1, 0}), std::invalid_argument);
}

TEST(FindRoots, RandomBoxesAgreeWithCount) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> re(-6, 6), im(-5, 1), side(0.3, 3);
  for (double k : {0.5, 1.0, 2.0}) {
    const auto d = maxwell(k);
    for (int i = 0; i < 4; ++i) {
      const double a = re(rng), b = im(rng);
      const SearchBox box{a, a + side(rng), b, b + side(rng)};
      const auto r = find_roots(d, box);
      int mult = 0;
      for (const auto& x : r.roots) mult += x.multiplicity;
      EXPECT_EQ(mult, r.total_count) << "k=" << k;
      EXPECT_TRUE(r.unresolved.empty());
    }
  }
}

TEST(FindRoots, FiveTwoDimensionalWavenumbers) {
  const auto eq = EquilibriumSpec::normalized_maxwellian_2d();
  const SearchBox box{0, 3, -0.5, 0.5};
  struct Case {
    std::vector<double> k;
    complex w;
  };
  const std::vector<Case> cases = {{{0.1, 0.1}, {1.030839024, -6.410202539e-10}},
                                   {{0.2, 0.2}, {1.140206800, -0.007780445579}},
                                   {{0.3, 0.3}, {1.316627173, -0.08467369148}},
                                   {{0.2, 0.1}, {1.081943401, -0.0004485284614}},
                                   {{0.3, 0.2}, {1.234323666, -0.04025247555}}};
  for (const auto& c : cases) {
    const auto r = find_roots(DispersionFunction(eq, c.k), box);
    ASSERT_FALSE(r.roots.empty());
    EXPECT_LE(std::abs(r.roots.front().omega - c.w), 1e-6);
  }
}
