#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "waveguide/bskernel.hpp"

using namespace waveguide;

namespace {

struct Fixture {
  Geometry g{1, 1};
  ModeBasis basis = solve_modes(g, 0.0, 2000);
  CouplingProfile well{0.0, RectWell{1.0, -1.0}};
};

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(BsKernel, DecompositionIdentitiesHoldOnTheGrid) {
  Fixture f;
  const KernelAssembler asmb(f.basis, f.well, make_grid(f.well, 400));
  for (double k : {0.05, 0.7, 2.0}) {
    const Eigen::MatrixXd K = asmb.assemble(KernelKind::FullK, k).matrix;
    const Eigen::MatrixXd qan = asmb.assemble(KernelKind::Q, k).matrix + asmb.assemble(KernelKind::A, k).matrix +
                                asmb.assemble(KernelKind::N, k).matrix;
    const Eigen::MatrixXd lmn = asmb.assemble(KernelKind::L, k).matrix + asmb.assemble(KernelKind::M, k).matrix +
                                asmb.assemble(KernelKind::N, k).matrix;
    EXPECT_LE(max_abs(K - qan), 1e-12) << "kappa1=" << k;
    EXPECT_LE(max_abs(K - lmn), 1e-12) << "kappa1=" << k;
  }
}

TEST(BsKernel, VanishingPerturbationGivesZeroKernel) {
  Fixture f;
  const CouplingProfile flat(0.0, RectWell{1.0, 0.0});
  EXPECT_EQ(kernel_full(0.1, 0.3, 1.0, f.basis, flat), 0.0);
  const auto op = assemble(KernelKind::FullK, 1.0, f.basis, flat, make_grid(1.0, 40));
  EXPECT_EQ(hs_norm(op), 0.0);
}

TEST(BsKernel, LongRangeDecayFollowsKappa1) {
  Fixture f;
  const CouplingProfile wide(0.0, RectWell{30.0, -1.0});
  const double kappa1 = 0.4;
  const double k_sq = f.basis.nu1() - kappa1 * kappa1;
  const double r1 = 8.0, r2 = 12.0;
  const double slope = std::log(kernel_full(0.0, r1, k_sq, f.basis, wide) / kernel_full(0.0, r2, k_sq, f.basis, wide)) /
                       (r2 - r1);
  EXPECT_NEAR(slope / kappa1, 1.0, 0.02);
}

TEST(BsKernel, CellAveragesOfTheFullKernelMatchPointValues) {
  // Off-diagonal cells far apart: the Galerkin entry approaches h * K(x_i, x_j).
  Fixture f;
  const Grid grid = make_grid(f.well, 400);
  const double kappa1 = 0.8;
  const auto op = KernelAssembler(f.basis, f.well, grid).assemble(KernelKind::FullK, kappa1);
  const std::size_t i = 20, j = 300;
  const double pt = kernel_full(grid.points[i], grid.points[j], f.basis.nu1() - kappa1 * kappa1, f.basis, f.well);
  EXPECT_NEAR(op.matrix(20, 300) / (grid.h * pt), 1.0, 1e-3);
}

TEST(BsKernel, SignDefiniteOperatorsAreSymmetric) {
  Fixture f;
  const KernelAssembler asmb(f.basis, f.well, make_grid(f.well, 200));
  for (KernelKind k : {KernelKind::FullK, KernelKind::A, KernelKind::N, KernelKind::M, KernelKind::A0,
                       KernelKind::M0, KernelKind::N0Beta}) {
    const Eigen::MatrixXd m = asmb.assemble(k, 0.5).matrix;
    EXPECT_LE(max_abs(m - m.transpose()), 1e-14 * std::max(1.0, max_abs(m))) << to_string(k);
  }
}

TEST(BsKernel, MixedSignSpectrumMatchesNonsymmetricMatrix) {
  Fixture f;
  const CouplingProfile dip(0.0, PiecewiseAlpha{{-1, 0, 1}, {1, -1}});
  const auto op = KernelAssembler(f.basis, dip, make_grid(dip, 120)).assemble(KernelKind::FullK, 0.6);
  const Eigen::VectorXd mu = bs_spectrum(op);
  Eigen::EigenSolver<Eigen::MatrixXd> es(op.matrix, false);
  std::vector<double> ref;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    EXPECT_LT(std::abs(es.eigenvalues()(i).imag()), 1e-9);
    ref.push_back(es.eigenvalues()(i).real());
  }
  std::sort(ref.begin(), ref.end());
  for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(mu(static_cast<Eigen::Index>(i)), ref[i], 1e-10);
}

TEST(BsKernel, HilbertSchmidtNormConvergesUnderRefinement) {
  Fixture f;
  std::vector<double> n;
  for (std::size_t cells : {100, 200, 400}) {
    const auto op = KernelAssembler(f.basis, f.well, make_grid(f.well, cells)).assemble(KernelKind::N, 0.5);
    n.push_back(hs_norm(op));
  }
  const double d1 = std::abs(n[1] - n[0]), d2 = std::abs(n[2] - n[1]);
  EXPECT_LT(d2, 0.6 * d1);
  EXPECT_LT(d2 / n[2], 1e-2);
}

TEST(BsKernel, ThresholdLimitsOfTheRegularParts) {
  Fixture f;
  const KernelAssembler asmb(f.basis, f.well, make_grid(f.well, 200));
  const Eigen::MatrixXd a0 = asmb.assemble(KernelKind::A0, 0.0).matrix;
  const Eigen::MatrixXd n0 = asmb.assemble(KernelKind::N0Beta, 0.0, 1.0).matrix;
  const Eigen::MatrixXd m0 = asmb.assemble(KernelKind::M0, 0.0).matrix;
  double pa = 1e300, pn = 1e300;
  for (double k : {0.1, 0.01, 0.001}) {
    const double da = hs_norm(asmb.assemble(KernelKind::A, k).matrix - a0);
    const double dn = hs_norm(asmb.assemble(KernelKind::N, k).matrix - n0);
    EXPECT_LT(da, pa);
    EXPECT_LT(dn, pn);
    pa = da;
    pn = dn;
  }
  EXPECT_LT(pa, 1e-3);
  EXPECT_LT(pn, 1e-3);
  EXPECT_LT(hs_norm(asmb.assemble(KernelKind::M, 1e-4).matrix - m0), 1e-3);
}

TEST(BsKernel, RankOnePartDivergesAtThreshold) {
  Fixture f;
  const KernelAssembler asmb(f.basis, f.well, make_grid(f.well, 50));
  EXPECT_THROW(asmb.assemble(KernelKind::Q, 0.0), DomainError);
  EXPECT_THROW(asmb.assemble(KernelKind::FullK, 0.0), DomainError);
  EXPECT_THROW(kernel_full(0.0, 0.5, f.basis.nu1() + 0.1, f.basis, f.well), DomainError);
  EXPECT_THROW(assemble(KernelKind::N, f.basis.nu1() + 0.1, f.basis, f.well, make_grid(f.well, 50)), DomainError);
}

TEST(BsKernel, GridCoversSupport) {
  const CouplingProfile p(0.0, RectWell{1.5, -1.0});
  const Grid g = make_grid(p, 60);
  double w = 0.0;
  for (double x : g.weights) w += x;
  EXPECT_NEAR(w, 2.0 * g.X, 1e-12);
  EXPECT_NEAR(g.X, 1.5, 1e-14);
}
