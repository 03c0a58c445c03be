#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "vplab/equilibrium.hpp"
#include "vplab/quadrature.hpp"

using namespace vplab;
using std::numbers::pi;

TEST(Equilibrium, PointValues) {
  const auto m1 = EquilibriumSpec::maxwellian_1d();
  const auto m2 = EquilibriumSpec::normalized_maxwellian_2d();
  EXPECT_DOUBLE_EQ(eval_equilibrium(m1, std::vector<double>{0.0}), 1.0);
  EXPECT_DOUBLE_EQ(eval_equilibrium(m2, std::vector<double>{0.0, 0.0}), 1.0 / (2 * pi));
  EXPECT_NEAR(eval_equilibrium(m1, std::vector<double>{1.0}), 0.60653065971263342, 1e-15);
  EXPECT_THROW(eval_equilibrium(m1, std::vector<double>{0.0, 0.0}), std::invalid_argument);
}

TEST(Equilibrium, RejectsBadTerms) {
  EXPECT_THROW((EquilibriumSpec{{GaussianTerm{1.0, {-1.0}}}}.validate()), std::invalid_argument);
  EXPECT_THROW((EquilibriumSpec{{GaussianTerm{1.0, {1.0}}, GaussianTerm{1.0, {1.0, 1.0}}}}.validate()),
               std::invalid_argument);
  EXPECT_THROW((EquilibriumSpec{{GaussianTerm{-1.0, {1.0}}}}.validate()), std::invalid_argument);
}

TEST(DirectionalFourier, MassAtZero) {
  const std::vector<double> k1{1.0}, k2{0.3, 0.4};
  EXPECT_NEAR(directional_fourier(EquilibriumSpec::maxwellian_1d(), k1)(0.0), std::sqrt(2 * pi), 1e-15);
  EXPECT_NEAR(directional_fourier(EquilibriumSpec::normalized_maxwellian_2d(), k2)(0.0), 1.0, 1e-15);
}

// Oracle: direct quadrature of int f(v) cos(k tau v) dv.
TEST(DirectionalFourier, MatchesQuadrature) {
  const EquilibriumSpec eq{{GaussianTerm{1.0, {1.0}}, GaussianTerm{0.4, {1.7}}}};
  const std::vector<double> k{2.0};
  const auto F = directional_fourier(eq, k);
  for (double tau : {0.0, 0.3, 1.0, 1.9}) {
    const double ref = quadrature::integrate(
        [&](double v) {
          return (std::exp(-v * v / 2) + 0.4 * std::exp(-v * v / (2 * 1.7 * 1.7))) * std::cos(k[0] * tau * v);
        },
        -40.0, 40.0);
    EXPECT_NEAR(F(tau), ref, 1e-13) << "tau=" << tau;
  }
  EXPECT_NEAR(directional_fourier(EquilibriumSpec::maxwellian_1d(), k)(1.0), std::sqrt(2 * pi) * std::exp(-2.0),
              1e-15);
}

TEST(InitialField, ZeroEpsilonIsEquilibrium) {
  PhaseGrid g(TorusSpec{{2 * pi}}, GridSpec{{8}, {16}, {5.0}, 0.1});
  const auto eq = EquilibriumSpec::maxwellian_1d();
  PerturbationSpec p{{{SpatialMode{1}, Phase::Cos, eq.terms}}, 0.0};
  const auto f = build_initial_field(eq, p, g);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 16; ++j) EXPECT_EQ(f.at(i, j), std::exp(-g.v(0)[j] * g.v(0)[j] / 2));
}

TEST(InitialField, TwoModePerturbationPointwise) {
  PhaseGrid g(TorusSpec{{2 * pi}}, GridSpec{{128}, {256}, {10.0}, 0.1});
  const double s2 = std::pow(2.0, 0.25), s3 = std::sqrt(pi) / 2;
  PerturbationSpec p{{{SpatialMode{2}, Phase::Cos, {GaussianTerm{1.0, {s2}}}},
                      {SpatialMode{3}, Phase::Cos, {GaussianTerm{1.0, {s3}}}}},
                     1e-3};
  const auto f = build_initial_field(EquilibriumSpec::maxwellian_1d(), p, g);
  for (std::size_t i : {0u, 17u, 64u, 127u})
    for (std::size_t j : {0u, 100u, 128u, 200u}) {
      const double x = g.x(0)[i], v = g.v(0)[j];
      const double ref = std::exp(-v * v / 2) + 1e-3 * (std::cos(2 * x) * std::exp(-v * v / (2 * s2 * s2)) +
                                                        std::cos(3 * x) * std::exp(-v * v / (2 * s3 * s3)));
      EXPECT_NEAR(f.at(i, j), ref, 1e-15);
    }
}

TEST(InitialField, TwoDimensionalPerturbation) {
  PhaseGrid g(TorusSpec{{20 * pi, 20 * pi}}, GridSpec{{8, 8}, {8, 8}, {6.0, 6.0}, 0.1});
  const auto eq = EquilibriumSpec::normalized_maxwellian_2d();
  PerturbationSpec p{{{SpatialMode{3, 3}, Phase::Cos, eq.terms}, {SpatialMode{2, 2}, Phase::Cos, eq.terms}}, 1e-3};
  const auto f = build_initial_field(eq, p, g);
  std::vector<double> x(2), v(2);
  for (std::size_t i = 0; i < g.nx_total(); i += 7)
    for (std::size_t j = 0; j < g.nv_total(); j += 5) {
      g.position_at(i, x);
      g.velocity_at(j, v);
      const double feq = std::exp(-(v[0] * v[0] + v[1] * v[1]) / 2) / (2 * pi);
      const double ref = feq * (1 + 1e-3 * (std::cos(0.3 * x[0] + 0.3 * x[1]) + std::cos(0.2 * x[0] + 0.2 * x[1])));
      EXPECT_NEAR(f.at(i, j), ref, 1e-16);
    }
}

TEST(Perturbation, ModeSetIncludesConjugates) {
  PerturbationSpec p{{{SpatialMode{2}, Phase::Cos, {GaussianTerm{1.0, {1.0}}}},
                      {SpatialMode{3}, Phase::Sin, {GaussianTerm{1.0, {1.0}}}}},
                     1e-3};
  const std::vector<SpatialMode> want = {SpatialMode{-3}, SpatialMode{-2}, SpatialMode{2}, SpatialMode{3}};
  EXPECT_EQ(p.mode_set(), want);
}

TEST(Perturbation, RejectsUnrepresentableMode) {
  PhaseGrid g(TorusSpec{{2 * pi}}, GridSpec{{8}, {16}, {5.0}, 0.1});
  PerturbationSpec p{{{SpatialMode{4}, Phase::Cos, {GaussianTerm{1.0, {1.0}}}}}, 1e-3};
  EXPECT_THROW(build_initial_field(EquilibriumSpec::maxwellian_1d(), p, g), std::invalid_argument);
}
