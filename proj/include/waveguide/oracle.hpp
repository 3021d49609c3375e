#pragma once

// Brute-force finite-difference reference solvers.
//
// 1D: -chi'' on (-d2, d1), Dirichlet ends, nodes y_k = -d2 + k*hy with y = 0 a
// node; the delta coupling adds alpha0/hy to the diagonal at y = 0.  The
// resulting tridiagonal matrix is handled by Sturm-sequence bisection.
//
// 2D: 5-point Laplacian on (-X, X) x (-d2, d1), Dirichlet on all edges, with
// alpha(x_i)/hy on the y = 0 row (alpha averaged over the node's x-cell).
// Eigenvalue counts come from the inertia of a sparse LDL^T factorisation of
// H - E, eigenvalues from bisection on that count.

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <vector>

#include "waveguide/errors.hpp"
#include "waveguide/profile.hpp"
#include "waveguide/transverse.hpp"

namespace waveguide {

namespace detail {

inline long exact_steps(double length, double h, const char* what) {
  const double n = length / h;
  const long r = std::lround(n);
  if (r < 2 || std::abs(n - static_cast<double>(r)) > 1e-9 * n) {
    std::ostringstream os;
    os << "finite-difference grid: spacing " << h << " does not divide " << what << " = " << length;
    throw DomainError(os.str());
  }
  return r;
}

// Number of eigenvalues < x of the symmetric tridiagonal matrix (diag, off).
inline int sturm_count(const std::vector<double>& diag, const std::vector<double>& off, double x) {
  int c = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < diag.size(); ++i) {
    const double o2 = i ? off[i - 1] * off[i - 1] : 0.0;
    q = diag[i] - x - (i ? o2 / q : 0.0);
    if (q == 0.0) q = -1e-300;
    if (q < 0.0) ++c;
  }
  return c;
}

}  // namespace detail

/// Lowest n_want eigenvalues of the 1D transverse finite-difference operator.
inline std::vector<double> transverse_fd_raw(const Geometry& g, double alpha0, double hy,
                                             std::size_t n_want) {
  const long n1 = detail::exact_steps(g.d1, hy, "d1");
  const long n2 = detail::exact_steps(g.d2, hy, "d2");
  const std::size_t n = static_cast<std::size_t>(n1 + n2 - 1);
  if (n_want > n) throw DomainError("transverse_fd: more eigenvalues requested than grid nodes");
  const double ih2 = 1.0 / (hy * hy);
  std::vector<double> diag(n, 2.0 * ih2), off(n - 1, -ih2);
  diag[static_cast<std::size_t>(n2 - 1)] += alpha0 / hy;
  double lo = std::min(0.0, alpha0 / hy) - 1.0, hi = 4.0 * ih2 + std::abs(alpha0) / hy + 1.0;
  std::vector<double> ev(n_want);
  for (std::size_t k = 0; k < n_want; ++k) {
    double a = lo, b = hi;
    for (int it = 0; it < 200 && b - a > 1e-15 * std::max(std::abs(a), std::abs(b)); ++it) {
      const double m = 0.5 * (a + b);
      if (m == a || m == b) break;
      (detail::sturm_count(diag, off, m) > static_cast<int>(k) ? b : a) = m;
    }
    ev[k] = 0.5 * (a + b);
    lo = a;
  }
  return ev;
}

struct TransverseFDResult {
  std::vector<double> eigenvalues;  // extrapolated
  std::vector<double> error;        // |extrapolated - finest raw|
};

/// Transverse eigenvalues on hy, hy/2, hy/4 with two Richardson steps (the
/// error expansion of the symmetric scheme is even in hy).
inline TransverseFDResult transverse_fd(const Geometry& g, double alpha0, double hy,
                                        std::size_t n_want) {
  const auto e1 = transverse_fd_raw(g, alpha0, hy, n_want);
  const auto e2 = transverse_fd_raw(g, alpha0, hy / 2.0, n_want);
  const auto e4 = transverse_fd_raw(g, alpha0, hy / 4.0, n_want);
  TransverseFDResult r;
  for (std::size_t k = 0; k < n_want; ++k) {
    const double r12 = (4.0 * e2[k] - e1[k]) / 3.0;
    const double r24 = (4.0 * e4[k] - e2[k]) / 3.0;
    const double rr = (16.0 * r24 - r12) / 15.0;
    r.eigenvalues.push_back(rr);
    r.error.push_back(std::abs(rr - r24));
  }
  return r;
}

struct FDConfig {
  double hx = 0.05;
  double hy = 0.05;
  double X = 8.0;
};

/// Sparse 2D finite-difference operator for one grid.
class StripFD {
 public:
  StripFD(const Geometry& g, const CouplingProfile& profile, const FDConfig& fd)
      : geometry_(g), fd_(fd) {
    const long n1 = detail::exact_steps(g.d1, fd.hy, "d1");
    const long n2 = detail::exact_steps(g.d2, fd.hy, "d2");
    const long nxs = detail::exact_steps(2.0 * fd.X, fd.hx, "2X");
    ny_ = n1 + n2 - 1;
    nx_ = nxs - 1;
    row0_ = n2 - 1;
    if (profile.support() > fd.X) throw DomainError("strip_fd: X must cover the profile support");

    const double ihx2 = 1.0 / (fd.hx * fd.hx), ihy2 = 1.0 / (fd.hy * fd.hy);
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(5 * nx_ * ny_));
    for (long i = 0; i < nx_; ++i) {
      const double x = -fd.X + static_cast<double>(i + 1) * fd.hx;
      const double alpha =
          profile.alpha0() +
          quad::gauss<8>([&](double s) { return profile.delta(s); }, x - 0.5 * fd.hx, x + 0.5 * fd.hx) / fd.hx;
      for (long k = 0; k < ny_; ++k) {
        const long p = idx(i, k);
        double d = 2.0 * ihx2 + 2.0 * ihy2;
        if (k == row0_) d += alpha / fd.hy;
        min_alpha_ = std::min(min_alpha_, alpha);
        t.emplace_back(p, p, d);
        if (i > 0) t.emplace_back(p, idx(i - 1, k), -ihx2);
        if (i + 1 < nx_) t.emplace_back(p, idx(i + 1, k), -ihx2);
        if (k > 0) t.emplace_back(p, idx(i, k - 1), -ihy2);
        if (k + 1 < ny_) t.emplace_back(p, idx(i, k + 1), -ihy2);
      }
    }
    H_.resize(nx_ * ny_, nx_ * ny_);
    H_.setFromTriplets(t.begin(), t.end());
    ldlt_.analyzePattern(H_);
    threshold_ = transverse_fd_raw(g, profile.alpha0(), fd.hy, 1).front();
  }

  /// Transverse threshold of this discretisation (infinite-x limit).
  double threshold() const { return threshold_; }
  Eigen::Index size() const { return H_.rows(); }

  /// Number of eigenvalues strictly below E.
  /// Not safe for concurrent calls on one instance (the symbolic
  /// factorisation is shared).
  int count_below(double E) const {
    Eigen::SparseMatrix<double> A = H_;
    A.diagonal().array() -= E;
    ldlt_.factorize(A);
    if (ldlt_.info() != Eigen::Success) throw InternalError("strip_fd: LDL^T factorisation failed");
    const Eigen::VectorXd d = ldlt_.vectorD();
    int c = 0;
    for (Eigen::Index i = 0; i < d.size(); ++i)
      if (d(i) < 0.0) ++c;
    return c;
  }

  /// The n lowest eigenvalues below `upper`, by bisection on the inertia count.
  std::vector<double> eigenvalues_below(double upper, std::size_t n, double tol) const {
    const int total = std::min<int>(count_below(upper), static_cast<int>(n));
    std::vector<double> ev;
    const double lo0 = std::min(0.0, min_alpha_ / fd_.hy) - 1.0;
    for (int j = 0; j < total; ++j) {
      double a = ev.empty() ? lo0 : ev.back() - tol, b = upper;
      while (b - a > tol) {
        const double m = 0.5 * (a + b);
        (count_below(m) > j ? b : a) = m;
      }
      ev.push_back(0.5 * (a + b));
    }
    return ev;
  }

 private:
  long idx(long i, long k) const { return i * ny_ + k; }

  Geometry geometry_;
  FDConfig fd_;
  long nx_ = 0, ny_ = 0, row0_ = 0;
  Eigen::SparseMatrix<double> H_;
  mutable Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
  double threshold_ = 0.0;
  double min_alpha_ = 0.0;  // Gershgorin: the spectrum lies above min(0, alpha) / hy
};

struct StripFDResult {
  std::vector<double> eigenvalues;  // below threshold - margin, ascending
  int count = 0;
  double threshold = 0.0;           // discrete transverse threshold
};

/// One finite-difference solve: all eigenvalues below threshold - margin.
inline StripFDResult strip_fd(const Geometry& g, const CouplingProfile& profile, const FDConfig& fd,
                              std::size_t n_want, double margin, double tol = 1e-9) {
  const StripFD op(g, profile, fd);
  StripFDResult r;
  r.threshold = op.threshold();
  const double upper = r.threshold - margin;
  r.count = op.count_below(upper);
  r.eigenvalues = op.eigenvalues_below(upper, n_want, tol);
  return r;
}

struct StripOracle {
  std::vector<double> eigenvalues;  // Richardson-extrapolated in h
  std::vector<double> error;        // self-reported: h-extrapolation + X sensitivity
  int count = 0;                    // states below threshold - margin (finest grid)
  bool count_stable = true;         // same count under h/2 and X -> 1.5 X
  double threshold = 0.0;
};

/// Refinement study: (h, X), (h/2, X), (h/2, 1.5 X).  Eigenvalues are
/// extrapolated in h^2; the reported error is the size of the extrapolation
/// correction plus the shift under X -> 1.5 X.  Throws when the X shift exceeds
/// x_tol, i.e. when the result is truncation-dominated.
inline StripOracle strip_oracle(const Geometry& g, const CouplingProfile& profile, double h, double X,
                                std::size_t n_want, double margin, double x_tol) {
  auto round_X = [&](double x, double hh) { return std::ceil(x / hh - 1e-9) * hh; };
  const FDConfig c1{h, h, round_X(X, h)};
  const FDConfig c2{h / 2.0, h / 2.0, round_X(X, h)};
  const FDConfig c3{h / 2.0, h / 2.0, round_X(1.5 * X, h)};
  const auto r1 = strip_fd(g, profile, c1, n_want, margin);
  const auto r2 = strip_fd(g, profile, c2, n_want, margin);
  const auto r3 = strip_fd(g, profile, c3, n_want, margin);
  StripOracle o;
  o.count = r2.count;
  o.count_stable = r1.count == r2.count && r2.count == r3.count;
  o.threshold = (4.0 * r2.threshold - r1.threshold) / 3.0;
  const std::size_t n = std::min({r1.eigenvalues.size(), r2.eigenvalues.size(), r3.eigenvalues.size()});
  for (std::size_t k = 0; k < n; ++k) {
    const double ext = (4.0 * r2.eigenvalues[k] - r1.eigenvalues[k]) / 3.0;
    const double dx = std::abs(r3.eigenvalues[k] - r2.eigenvalues[k]);
    if (dx > x_tol) {
      std::ostringstream os;
      os << "truncation-dominated; increase X (eigenvalue " << k + 1 << " moved by " << dx
         << " under X -> 1.5 X)";
      throw RegimeError(os.str());
    }
    o.eigenvalues.push_back(ext);
    o.error.push_back(std::abs(ext - r2.eigenvalues[k]) + dx);
  }
  return o;
}

}  // namespace waveguide
