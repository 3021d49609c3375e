#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "waveguide/asymptotics.hpp"
#include "waveguide/spectrum.hpp"

using namespace waveguide;

namespace {

const ModeBasis& unit_basis() {
  static const ModeBasis b = solve_modes(Geometry{1, 1}, 0.0, 4000);
  return b;
}

BSNumerics fine() {
  BSNumerics n;
  n.n_cells = 400;
  return n;
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST(Asymptotics, LeadingCoefficientIsMinusHalfChiSquaredTimesIntegral) {
  const CouplingProfile well(0.0, RectWell{1.0, -1.0});
  const auto c = weak_coupling_expansion(well, unit_basis());
  EXPECT_NEAR(c.c1_lambda, -0.5 * unit_basis().chi1_sq() * (-2.0), 1e-12);
  EXPECT_NEAR(c.c_our_result, c.c1_lambda * c.c1_lambda, 1e-15);
}

TEST(Asymptotics, WeakCouplingRemainderIsThirdOrder) {
  const CouplingProfile well(0.0, RectWell{1.0, -1.0});
  const auto c = weak_coupling_expansion(well, unit_basis());
  std::vector<double> lam{0.04, 0.02, 0.01}, rem;
  for (double l : lam) {
    const auto rep = find_bound_states(well.with_lambda(l), unit_basis(), fine());
    ASSERT_TRUE(rep.ground_state);
    rem.push_back(std::abs(rep.ground_state->kappa1 - c.kappa_lambda(l, 2)));
  }
  EXPECT_NEAR(slope(lam, rem), 3.0, 0.4);
}

TEST(Asymptotics, ScaledRemainderIsThirdOrder) {
  const CouplingProfile well(0.0, RectWell{1.0, -0.5});
  std::vector<double> sig{0.2, 0.1, 0.05}, rem;
  for (double s : sig) {
    const auto c = scaled_expansion(well, unit_basis(), s);
    const auto rep = find_bound_states(well.with_sigma(s), unit_basis(), fine());
    ASSERT_TRUE(rep.ground_state);
    rem.push_back(std::abs(rep.ground_state->kappa1 - c.kappa_sigma(2)));
  }
  EXPECT_NEAR(slope(sig, rem), 3.0, 0.4);
}

TEST(Asymptotics, ScaledSecondOrderTermDependsOnSigma) {
  // The exponential is kept unexpanded, so c2 is not constant in sigma.
  const CouplingProfile well(0.0, RectWell{1.0, -1.0});
  const auto a = scaled_expansion(well, unit_basis(), 0.2);
  const auto b = scaled_expansion(well, unit_basis(), 0.05);
  EXPECT_GT(std::abs(a.c2_sigma - b.c2_sigma), 1e-3);
  EXPECT_DOUBLE_EQ(a.c1_sigma, b.c1_sigma);
  EXPECT_THROW(scaled_expansion(well, unit_basis(), 0.0), DomainError);
  EXPECT_THROW(scaled_expansion(well, unit_basis(), 1.5), DomainError);
}

TEST(Asymptotics, ModeTailIsSmallAgainstTheSum) {
  const CouplingProfile well(0.0, RectWell{1.0, -1.0});
  const auto c = weak_coupling_expansion(well, unit_basis());
  EXPECT_LT(std::abs(c.tail_estimate), 1e-2 * std::abs(c.mode_sum_term));
}

TEST(Asymptotics, MeanZeroProfileBindsWithPositiveSecondOrder) {
  const CouplingProfile dipole(0.0, PiecewiseAlpha{{-1, 0, 1}, {1, -1}});
  const auto crit = existence_criterion_report(dipole);
  EXPECT_TRUE(crit.exists);
  EXPECT_TRUE(crit.boundary_case);
  const auto c = weak_coupling_expansion(dipole, unit_basis());
  EXPECT_NEAR(c.c1_lambda, 0.0, 1e-14);
  EXPECT_GT(c.c2_lambda, 0.0);
  const auto rep = find_bound_states(dipole.with_lambda(0.5), unit_basis(), fine());
  EXPECT_TRUE(rep.ground_state.has_value());
}

TEST(Asymptotics, RepulsiveBumpHasNoWeaklyCoupledState) {
  const CouplingProfile bump(0.0, RectWell{1.0, 1.0});
  EXPECT_FALSE(existence_criterion(bump));
  for (double l : {0.05, 0.01})
    EXPECT_TRUE(find_bound_states(bump.with_lambda(l), unit_basis(), fine()).eigenvalues.empty());
}

TEST(Asymptotics, AttractiveProfileSatisfiesCriterion) {
  EXPECT_TRUE(existence_criterion(CouplingProfile(0.0, RectWell{1.0, -0.1})));
}

TEST(Asymptotics, DirichletProbeShrinksTheFirstTerm) {
  const auto rows = dirichlet_limit_probe(Geometry{1, 1}, 0.5, 0.1, {1.0, 10.0, 100.0}, 500);
  ASSERT_EQ(rows.size(), 3u);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LT(rows[i].chi1_sq, rows[i - 1].chi1_sq);
}
