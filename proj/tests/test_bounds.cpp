#include <gtest/gtest.h>

#include <cmath>

#include "waveguide/bounds.hpp"
#include "waveguide/spectrum.hpp"

using namespace waveguide;

namespace {

const ModeBasis& unit_basis() {
  static const ModeBasis b = solve_modes(Geometry{1, 1}, 0.0, 4000);
  return b;
}

}  // namespace

TEST(Bounds, RectWellClosedFormMatchesGeneralQuadrature) {
  for (double a : {0.025, 0.5, 1.0, 2.0, 4.0}) {
    const double rect = skn_bound_rectwell(a, 2.0, unit_basis());
    const auto gen = skn_bound_general(CouplingProfile(0.0, RectWell{a, -2.0}), unit_basis());
    EXPECT_NEAR(gen.value / rect, 1.0, 1e-4) << "a=" << a;
    EXPECT_GE(rect, 1.0) << "a=" << a;
  }
}

TEST(Bounds, KnownValuesOfTheRectWellBound) {
  EXPECT_NEAR(skn_bound_rectwell(1.0, 2.0, unit_basis()), 2.2309176, 1e-5);
  EXPECT_NEAR(skn_bound_rectwell(4.0, 2.0, unit_basis()), 191.6, 0.1);
}

TEST(Bounds, WeakCouplingLimitApproachesOne) {
  const double v = skn_bound_rectwell(0.025, 2.0, unit_basis());
  EXPECT_GE(v, 1.0);
  EXPECT_LE(v, 1.2);
}

TEST(Bounds, SampledProfileUsesTheSameValue) {
  // A sampled constant well reproduces the piecewise value.
  const CouplingProfile sampled(0.0, SampledDelta{[](double x) { return std::abs(x) < 1.0 ? -2.0 : 0.0; }, 1.0});
  const double rect = skn_bound_rectwell(1.0, 2.0, unit_basis());
  EXPECT_NEAR(skn_bound_general(sampled, unit_basis()).value / rect, 1.0, 1e-4);
}

TEST(Bounds, MonteCarloAgreesWithinItsError) {
  const CouplingProfile well(0.0, RectWell{1.0, -2.0});
  const auto mc = skn_bound_general(well, unit_basis(), SknStrategy::MonteCarlo, 11, 200000);
  const double ref = skn_bound_rectwell(1.0, 2.0, unit_basis());
  EXPECT_GT(mc.error, 0.0);
  EXPECT_LT(std::abs(mc.value - ref), 5.0 * mc.error);
}

TEST(Bounds, MonteCarloIsDeterministicForAFixedSeed) {
  const CouplingProfile well(0.0, RectWell{1.0, -2.0});
  const auto a = skn_bound_general(well, unit_basis(), SknStrategy::MonteCarlo, 5, 20000);
  const auto b = skn_bound_general(well, unit_basis(), SknStrategy::MonteCarlo, 5, 20000);
  const auto c = skn_bound_general(well, unit_basis(), SknStrategy::MonteCarlo, 6, 20000);
  EXPECT_EQ(a.value, b.value);
  EXPECT_NE(a.value, c.value);
}

TEST(Bounds, GeneralBoundRejectsPurelyRepulsiveProfile) {
  EXPECT_THROW(skn_bound_general(CouplingProfile(0.0, RectWell{1.0, 1.0}), unit_basis()), DomainError);
}

TEST(Bounds, BracketingAndCountsFormAChain) {
  const ModeBasis b1 = solve_modes(Geometry{1, 1}, -2.0, 4);
  BSNumerics num;
  num.n_cells = 200;
  for (double a : {0.5, 1.0, 2.0, 4.0}) {
    const auto br = bracketing_bound(a, unit_basis(), b1);
    const int n = find_bound_states(CouplingProfile(0.0, RectWell{a, -2.0}), unit_basis(), num).count();
    EXPECT_LE(br.upper - 1, n) << "a=" << a;
    EXPECT_LE(n, br.upper) << "a=" << a;
    EXPECT_LE(n, skn_bound_rectwell(a, 2.0, unit_basis())) << "a=" << a;
  }
}

TEST(Bounds, BracketingArgumentAndErrors) {
  const ModeBasis b1 = solve_modes(Geometry{1, 1}, -2.0, 4);
  const auto br = bracketing_bound(1.0, unit_basis(), b1);
  EXPECT_NEAR(br.argument, 2.0 / std::numbers::pi * std::sqrt(unit_basis().nu1() - b1.nu1()), 1e-14);
  EXPECT_EQ(br.lower, br.upper - 1);
  EXPECT_THROW(bracketing_bound(0.0, unit_basis(), b1), DomainError);
  EXPECT_THROW(bracketing_bound(1.0, b1, unit_basis()), DomainError);
}

TEST(Bounds, SknGrowsFasterThanBracketing) {
  const ModeBasis b1 = solve_modes(Geometry{1, 1}, -2.0, 4);
  EXPECT_GT(skn_bound_rectwell(4.0, 2.0, unit_basis()), bracketing_bound(4.0, unit_basis(), b1).upper);
}
