#include <gtest/gtest.h>

#include <cmath>

#include "waveguide/profile.hpp"

using namespace waveguide;

TEST(Profile, RectWellPerturbationAndScaling) {
  const CouplingProfile p(1.0, RectWell{2.0, -1.0});
  EXPECT_DOUBLE_EQ(p.delta(0.0), -2.0);
  EXPECT_DOUBLE_EQ(p.delta(2.5), 0.0);
  EXPECT_DOUBLE_EQ(p.integral(), -8.0);
  const CouplingProfile s = p.with_lambda(0.5).with_sigma(0.25);
  EXPECT_DOUBLE_EQ(s.delta(0.4), -1.0);
  EXPECT_DOUBLE_EQ(s.delta(0.6), 0.0);
  EXPECT_DOUBLE_EQ(s.support(), 0.5);
  EXPECT_NEAR(s.integral(), 0.5 * 0.25 * -8.0, 1e-14);
  const CouplingProfile b = s.bare();
  EXPECT_DOUBLE_EQ(b.delta(1.0), -2.0);
}

TEST(Profile, PiecewiseDipoleHasZeroMean) {
  const CouplingProfile p(0.0, PiecewiseAlpha{{-1, 0, 1}, {1, -1}});
  EXPECT_NEAR(p.integral(), 0.0, 1e-15);
  EXPECT_NEAR(p.l1_norm(), 2.0, 1e-14);
  EXPECT_EQ(p.sign(), 0);
  const CouplingProfile g = p.negative_part();
  EXPECT_NEAR(g.integral(), -1.0, 1e-14);
  EXPECT_EQ(g.sign(), -1);
  EXPECT_DOUBLE_EQ(p.gamma(0.5), 1.0);
  EXPECT_DOUBLE_EQ(p.gamma(-0.5), 0.0);
  EXPECT_NEAR(p.attractive_majorant().integral(), -2.0, 1e-14);
}

TEST(Profile, SampledProfileIntegralsAndMoments) {
  const CouplingProfile p(0.0, SampledDelta{[](double x) { return -std::cos(x) * std::cos(x); }, M_PI / 2});
  EXPECT_NEAR(p.integral(), -M_PI / 2, 1e-10);
  const Integrability in = p.integrability();
  EXPECT_TRUE(in.a1 && in.a2 && in.a2_prime);
  EXPECT_NEAR(in.second_moment, (std::pow(M_PI, 3) / 24.0 - M_PI / 4.0), 1e-9);
  EXPECT_FALSE(p.is_piecewise_constant());
}

TEST(Profile, ZeroPerturbation) {
  const CouplingProfile p(2.0, RectWell{1.0, 2.0});
  EXPECT_TRUE(p.is_zero());
  EXPECT_TRUE(p.pieces()->empty());
}

TEST(Profile, RejectsInvalidInput) {
  EXPECT_THROW(CouplingProfile(0.0, RectWell{0.0, -1.0}), DomainError);
  EXPECT_THROW(CouplingProfile(0.0, PiecewiseAlpha{{0, 0}, {1}}), DomainError);
  EXPECT_THROW(CouplingProfile(0.0, PiecewiseAlpha{{0, 1}, {1, 2}}), DomainError);
  const CouplingProfile p(0.0, RectWell{1.0, -1.0});
  EXPECT_THROW(p.with_lambda(-1.0), DomainError);
  EXPECT_THROW(p.with_sigma(0.0), DomainError);
  EXPECT_THROW(p.with_sigma(1.5), DomainError);
}
