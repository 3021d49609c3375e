#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "waveguide/oracle.hpp"
#include "waveguide/spectrum.hpp"

using namespace waveguide;

TEST(Oracle, TransverseFDConvergesToExactModes) {
  const auto r = transverse_fd(Geometry{1, 1}, 0.0, 0.05, 4);
  for (std::size_t n = 0; n < 4; ++n) {
    const double exact = std::pow(std::numbers::pi * static_cast<double>(n + 1) / 2.0, 2);
    EXPECT_NEAR(r.eigenvalues[n] / exact, 1.0, 1e-7);
    EXPECT_LT(r.error[n], 1e-3 * exact);
  }
}

TEST(Oracle, TransverseFDAgreesWithSecularSolverWithCoupling) {
  const Geometry g{1, 2};
  const auto r = transverse_fd(g, 3.0, 0.02, 5);
  const ModeBasis b = solve_modes(g, 3.0, 5);
  for (std::size_t n = 0; n < 5; ++n) EXPECT_NEAR(r.eigenvalues[n] / b.modes[n].nu, 1.0, 1e-7);
}

TEST(Oracle, GridMustDivideTheWidths) {
  EXPECT_THROW(transverse_fd(Geometry{1, 1}, 0.0, 0.3, 2), DomainError);
  EXPECT_THROW(strip_fd(Geometry{1, 1}, CouplingProfile(0.0, RectWell{1.0, -1.0}), FDConfig{0.1, 0.1, 0.5}, 1, 0.0),
               DomainError);
}

TEST(Oracle, EmptyStripHasNothingBelowThreshold) {
  const auto r = strip_fd(Geometry{1, 1}, CouplingProfile(0.0, RectWell{1.0, 0.0}), FDConfig{0.1, 0.1, 4.0}, 2, 1e-3);
  EXPECT_EQ(r.count, 0);
  EXPECT_TRUE(r.eigenvalues.empty());
}

TEST(Oracle, RectWellGroundStateAgreesWithBS) {
  const Geometry g{1, 1};
  const CouplingProfile well(0.0, RectWell{1.0, -1.0});
  const auto o = strip_oracle(g, well, 0.1, 6.0, 2, 1e-3, 1e-3);
  ASSERT_FALSE(o.eigenvalues.empty());
  const ModeBasis basis = solve_modes(g, 0.0, 4000);
  BSNumerics num;
  num.n_cells = 400;
  const auto rep = find_bound_states(well, basis, num);
  ASSERT_TRUE(rep.ground_state);
  EXPECT_EQ(o.count, rep.count());
  EXPECT_TRUE(o.count_stable);
  EXPECT_LT(std::abs(o.eigenvalues[0] - rep.ground_state->E), std::max(o.error[0], 1e-3));
}

TEST(Oracle, InertiaCountIsMonotone) {
  const StripFD op(Geometry{1, 1}, CouplingProfile(0.0, RectWell{2.0, -2.0}), FDConfig{0.1, 0.1, 5.0});
  int prev = 0;
  for (double E : {-5.0, 0.0, 1.0, 2.0, op.threshold() - 1e-6}) {
    const int c = op.count_below(E);
    EXPECT_GE(c, prev);
    prev = c;
  }
  EXPECT_GE(prev, 2);
}

TEST(Oracle, TruncationDominatedResultIsReported) {
  // A moderate well in a short box: the state still feels the box ends.
  const CouplingProfile shallow(0.0, RectWell{0.5, -4.0});
  EXPECT_THROW(strip_oracle(Geometry{1, 1}, shallow, 0.1, 1.0, 1, 0.0, 1e-3), RegimeError);
}
