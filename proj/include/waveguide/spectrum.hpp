#pragma once

// Bound states below the threshold nu_1 through the Birman-Schwinger principle:
// k^2 = nu_1 - kappa_1^2 is an eigenvalue of multiplicity m iff -1 is an
// eigenvalue of K(kappa_1) of multiplicity m.  The number of eigenvalues of K
// below -1 equals the number of bound states below k^2 (Sylvester inertia of
// G^{-1} + V on the Galerkin space), so a scan of that count brackets every
// state before the crossing itself is refined.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <tuple>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>

#include "waveguide/bskernel.hpp"
#include "waveguide/errors.hpp"
#include "waveguide/profile.hpp"
#include "waveguide/transverse.hpp"

namespace waveguide {

struct SpectralPoint {
  double E = 0.0;
  double kappa1 = 0.0;
  double k_sq = 0.0;

  static SpectralPoint from_kappa(double nu1, double kappa1) {
    return {nu1 - kappa1 * kappa1, kappa1, nu1 - kappa1 * kappa1};
  }
};

struct BoundState {
  SpectralPoint point;
  int multiplicity = 1;
  double residual = 0.0;  // |mu + 1| for the eigenvalue of K closest to -1
};

struct EigenCurves {
  std::vector<double> kappa1;
  std::vector<std::vector<double>> curves;  // curves[c][i]: c-th lowest eigenvalue at kappa1[i]
};

struct SpectralReport {
  std::vector<BoundState> eigenvalues;  // ascending in E
  std::optional<SpectralPoint> ground_state;
  EigenCurves bs_eigencurve;
  std::map<int, double> schatten_p_norms;  // p -> ||K||_p^p at the threshold probe
  int threshold_count = 0;                 // N at E = nu_1 - eps_thr
  bool threshold_count_stable = true;      // same count at eps_thr / 10

  int count() const {
    int n = 0;
    for (const auto& s : eigenvalues) n += s.multiplicity;
    return n;
  }
};

struct BSNumerics {
  std::size_t n_cells = 400;
  double kappa_tol = 1e-10;
  double multiplicity_tol = 1e-6;
  double kappa_min = 1e-6;
  std::size_t scan_points = 40;
  double threshold_eps_rel = 1e-6;
};

/// Assembled Birman-Schwinger problem for one profile on one grid.
class BSProblem {
 public:
  BSProblem(const ModeBasis& basis, const CouplingProfile& profile, const BSNumerics& num = {})
      : basis_(&basis),
        profile_(profile),
        num_(num),
        assembler_(basis, profile, make_grid(profile, num.n_cells)) {}

  const ModeBasis& basis() const { return *basis_; }
  const CouplingProfile& profile() const { return profile_; }
  const KernelAssembler& assembler() const { return assembler_; }
  const BSNumerics& numerics() const { return num_; }

  Eigen::VectorXd spectrum(double kappa1) const {
    return bs_spectrum(assembler_.assemble(KernelKind::FullK, kappa1));
  }

  /// Number of eigenvalues of K(kappa1) below -1.
  int count(double kappa1) const {
    const Eigen::VectorXd mu = spectrum(kappa1);
    int c = 0;
    for (Eigen::Index i = 0; i < mu.size(); ++i)
      if (mu(i) < -1.0) ++c;
    return c;
  }

 private:
  const ModeBasis* basis_;
  CouplingProfile profile_;
  BSNumerics num_;
  KernelAssembler assembler_;
};

/// The n_curves lowest eigenvalues of K on the given kappa_1 grid.
inline EigenCurves bs_eigencurves(const CouplingProfile& profile, const ModeBasis& basis,
                                  const std::vector<double>& kappa1_grid, std::size_t n_curves,
                                  const BSNumerics& num = {}) {
  for (double k : kappa1_grid)
    if (!(k > 0.0)) throw DomainError("bs_eigencurves: kappa1 must be positive");
  EigenCurves out;
  out.kappa1 = kappa1_grid;
  out.curves.assign(n_curves, std::vector<double>(kappa1_grid.size(), 0.0));
  if (profile.is_zero() || kappa1_grid.empty()) return out;
  const BSProblem prob(basis, profile, num);
  for (std::size_t i = 0; i < kappa1_grid.size(); ++i) {
    const Eigen::VectorXd mu = prob.spectrum(kappa1_grid[i]);
    for (std::size_t c = 0; c < n_curves && static_cast<Eigen::Index>(c) < mu.size(); ++c)
      out.curves[c][i] = mu(static_cast<Eigen::Index>(c));
  }
  return out;
}

inline std::vector<double> geometric_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  if (n == 1) {
    g[0] = lo;
    return g;
  }
  const double r = std::log(hi / lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) g[i] = lo * std::exp(r * static_cast<double>(i));
  g.back() = hi;
  return g;
}

/// All bound states below nu_1.
inline SpectralReport find_bound_states(const CouplingProfile& profile, const ModeBasis& basis,
                                        const BSNumerics& num = {}) {
  const Integrability integ = profile.integrability();
  if (!integ.a2) throw DomainError("find_bound_states: profile fails the integrability assumptions");
  SpectralReport rep;
  if (profile.is_zero()) return rep;

  const BSProblem prob(basis, profile, num);
  const double nu1 = basis.nu1();
  const double root_nu1 = std::sqrt(std::abs(nu1));

  // Upper end of the scan: enlarge until no eigenvalue of K lies below -1.
  double k_hi = std::max(root_nu1, 1.0);
  for (int it = 0; prob.count(k_hi) > 0; ++it) {
    if (it > 60) throw InternalError("find_bound_states: no upper bracket for the ground state");
    k_hi *= 2.0;
  }
  const double k_lo = num.kappa_min;

  // Geometric scan; records the eigencurves and brackets every count change.
  const auto grid = geometric_grid(k_lo, k_hi, std::max<std::size_t>(num.scan_points, 2));
  rep.bs_eigencurve.kappa1 = grid;
  std::vector<int> counts(grid.size());
  std::size_t n_curves = 0;
  std::vector<Eigen::VectorXd> spectra(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    spectra[i] = prob.spectrum(grid[i]);
    int c = 0;
    for (Eigen::Index e = 0; e < spectra[i].size(); ++e)
      if (spectra[i](e) < -1.0) ++c;
    counts[i] = c;
  }
  const int n_total = counts.front();
  for (std::size_t i = 1; i < counts.size(); ++i)
    if (counts[i] > counts[i - 1]) {
      // Counts must be nonincreasing in kappa1; a violation means the grid is
      // too coarse to be trusted and is reported rather than papered over.
      std::ostringstream os;
      os << "find_bound_states: count increased from " << counts[i - 1] << " to " << counts[i]
         << " between kappa1 = " << grid[i - 1] << " and " << grid[i];
      throw InternalError(os.str());
    }
  n_curves = static_cast<std::size_t>(std::max(n_total, 1));
  rep.bs_eigencurve.curves.assign(n_curves, std::vector<double>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t c = 0; c < n_curves && static_cast<Eigen::Index>(c) < spectra[i].size(); ++c)
      rep.bs_eigencurve.curves[c][i] = spectra[i](static_cast<Eigen::Index>(c));

  // The j-th eigenvalue mu_j(kappa) is continuous and crosses -1 inside the
  // bracket where count(kappa) drops below j; TOMS 748 refines the crossing.
  for (int j = 1; j <= n_total;) {
    std::size_t i = 0;
    while (i + 1 < grid.size() && counts[i + 1] >= j) ++i;
    double a = grid[i], b = grid[i + 1];
    const auto jj = static_cast<Eigen::Index>(j - 1);
    auto f = [&](double k) { return prob.spectrum(k)(jj) + 1.0; };
    const double fa = spectra[i](jj) + 1.0, fb = spectra[i + 1](jj) + 1.0;
    if (fb == 0.0) {
      a = b;
    } else {
      std::uintmax_t iters = 100;
      auto tol = [&](double x, double y) { return std::abs(x - y) <= num.kappa_tol * std::max(1.0, y); };
      std::tie(a, b) = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, iters);
    }
    const double kappa = 0.5 * (a + b);
    const Eigen::VectorXd mu = prob.spectrum(kappa);
    int mult = 0;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index e = 0; e < mu.size(); ++e) {
      const double r = std::abs(mu(e) + 1.0);
      best = std::min(best, r);
      if (r < num.multiplicity_tol) ++mult;
    }
    mult = std::max(mult, 1);
    BoundState s;
    s.point = SpectralPoint::from_kappa(nu1, kappa);
    s.multiplicity = mult;
    s.residual = best;
    rep.eigenvalues.push_back(s);
    j += mult;
  }
  std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(),
            [](const BoundState& x, const BoundState& y) { return x.point.E < y.point.E; });
  if (!rep.eigenvalues.empty()) rep.ground_state = rep.eigenvalues.front().point;

  const double eps = num.threshold_eps_rel * std::abs(nu1);
  rep.threshold_count = prob.count(std::sqrt(eps));
  rep.threshold_count_stable = prob.count(std::sqrt(eps / 10.0)) == rep.threshold_count;
  return rep;
}

struct CountResult {
  int n_below = 0;
  double schatten1 = 0.0;  // ||K||_1 (trace norm)
  double schatten2 = 0.0;  // ||K||_2^2 (squared Hilbert-Schmidt norm)
};

/// Number of bound states below E of the operator with alpha replaced by
/// alpha0 - gamma, together with the Schatten bounds N_E <= ||K||_p^p.
inline CountResult count_below(double E, const CouplingProfile& profile, const ModeBasis& basis,
                               const BSNumerics& num = {}) {
  const double nu1 = basis.nu1();
  if (!(E < nu1)) throw DomainError("count_below: E must lie below the threshold");
  CountResult r;
  const CouplingProfile neg = profile.negative_part();
  if (neg.is_zero()) return r;
  const KernelAssembler asmb(basis, neg, make_grid(neg, num.n_cells));
  const DiscretizedOperator op = asmb.assemble(KernelKind::FullK, std::sqrt(nu1 - E));
  const Eigen::VectorXd mu = bs_spectrum(op);
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    if (mu(i) <= -1.0) ++r.n_below;
    r.schatten1 += std::abs(mu(i));
  }
  r.schatten2 = op.matrix.squaredNorm();
  return r;
}

enum class ImplicitMode { WeakLambda, ScaledSigma };

struct ImplicitResult {
  std::optional<SpectralPoint> point;
  double p_norm = 0.0;   // spectral norm of P at the solution (or at kappa1 = 0)
  double residual = 0.0;
  int iterations = 0;
};

/// Fixed point kappa_1 = G(kappa_1) of the implicit ground-state equation,
///   G(k) = -(chi_1(0)^2 / 2) (a_k, (I + P_k)^{-1} b_k),
/// with P = A + N and a, b carrying exp(-k|x|) (WeakLambda), or P = M + N and
/// constant a, b (ScaledSigma).  The coupling lambda and the scale sigma are
/// those carried by the profile.
inline ImplicitResult solve_implicit_ground_state(const CouplingProfile& profile,
                                                  const ModeBasis& basis, ImplicitMode mode,
                                                  double tol = 1e-12, const BSNumerics& num = {}) {
  ImplicitResult res;
  if (profile.is_zero()) return res;
  const KernelAssembler asmb(basis, profile, make_grid(profile, num.n_cells));
  const Eigen::VectorXd& row = asmb.row_factor();
  const Eigen::VectorXd& col = asmb.col_factor();
  const double chi1 = basis.chi1_sq();
  const double sqrt_h = std::sqrt(asmb.grid().h);

  auto p_matrix = [&](double k) -> Eigen::MatrixXd {
    const KernelKind near = mode == ImplicitMode::WeakLambda ? KernelKind::A : KernelKind::M;
    Eigen::MatrixXd g = asmb.base(near, k) + asmb.base(KernelKind::N, k);
    return row.asDiagonal() * g * col.asDiagonal();
  };
  auto spectral_norm = [](const Eigen::MatrixXd& m) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
    return svd.singularValues()(0);
  };
  auto G = [&](double k, double* pnorm) {
    const Eigen::MatrixXd P = p_matrix(k);
    if (pnorm) *pnorm = spectral_norm(P);
    Eigen::VectorXd a, b;
    if (mode == ImplicitMode::WeakLambda) {
      const Eigen::VectorXd q = asmb.exp_cell_vector(k);
      a = col.cwiseProduct(q);
      b = row.cwiseProduct(q);
    } else {
      a = col * sqrt_h;
      b = row * sqrt_h;
    }
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(P.rows(), P.cols());
    const Eigen::VectorXd v = (I + P).partialPivLu().solve(b);
    return -0.5 * chi1 * a.dot(v);
  };

  double pn = 0.0;
  const double g0 = G(0.0, &pn);
  res.p_norm = pn;
  if (!(pn < 1.0)) {
    std::ostringstream os;
    os << "outside the perturbative regime of the implicit equation: ||P|| = " << pn << " >= 1";
    throw RegimeError(os.str());
  }
  if (!(g0 > 0.0)) return res;

  // Plain iteration is a contraction here (|G'| is small when ||P|| < 1); keep
  // a bracket [lo, hi] of F(k) = k - G(k) and fall back to bisection on it.
  double lo = 0.0, hi = std::numeric_limits<double>::infinity();
  double k = g0;
  for (int it = 1; it <= 200; ++it) {
    res.iterations = it;
    const double gk = G(k, nullptr);
    const double f = k - gk;
    if (std::abs(f) <= tol * std::max(1.0, k)) {
      res.residual = std::abs(f);
      break;
    }
    if (f < 0.0) lo = std::max(lo, k); else hi = std::min(hi, k);
    double next = gk;
    if (!(next > lo && next < hi)) next = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * std::max(k, lo);
    if (std::isfinite(hi) && hi - lo <= tol * std::max(1.0, hi)) {
      k = 0.5 * (lo + hi);
      res.residual = std::abs(k - G(k, nullptr));
      break;
    }
    k = next;
    if (it == 200) throw InternalError("implicit ground-state iteration did not converge");
  }
  G(k, &pn);
  res.p_norm = std::max(res.p_norm, pn);
  if (!(pn < 1.0)) throw RegimeError("outside the perturbative regime of the implicit equation");
  res.point = SpectralPoint::from_kappa(basis.nu1(), k);
  return res;
}

}  // namespace waveguide
