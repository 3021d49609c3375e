#pragma once

// Discretised Birman-Schwinger operators
//
//     K(x, x') = |V(x)|^{1/2} G(x, x') V(x')^{1/2},
//     G(x, x') = sum_n |chi_n(0)|^2 / (2 kappa_n) exp(-kappa_n |x - x'|),
//
// and their pieces (Q, A, N), (L, M, N) and the kappa_1 -> 0 comparison
// kernels A0, M0, N0^beta.  V^{1/2} := |V|^{1/2} sgn V.
//
// The discretisation is a Galerkin projection onto cell indicators
// phi_i = h^{-1/2} 1_{cell i} on a uniform grid of the support window.  With V
// replaced by its cell averages the matrix entries are
//
//     M_ij = |V_i|^{1/2} g_ij V_j^{1/2},   g_ij = h^{-1} int_i int_j g(x, x') dx dx',
//
// and the Frobenius norm of M is the Hilbert-Schmidt norm of the projected
// operator.  Cell integrals of exp(-kappa |x - x'|) are closed-form, so the
// logarithmic diagonal singularity of the mode sum needs no special handling;
// modes beyond the computed basis enter through their asymptotic density.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "waveguide/errors.hpp"
#include "waveguide/profile.hpp"
#include "waveguide/quadrature.hpp"
#include "waveguide/transverse.hpp"

namespace waveguide {

struct Grid {
  std::vector<double> points;   // cell midpoints
  std::vector<double> weights;  // cell widths
  double X = 0.0;               // window half-length
  double h = 0.0;               // uniform cell width

  std::size_t size() const { return points.size(); }
  double left(std::size_t i) const { return -X + static_cast<double>(i) * h; }
  double right(std::size_t i) const { return -X + static_cast<double>(i + 1) * h; }
};

/// Uniform midpoint grid with an even number of cells on [-X, X]; x = 0 is a
/// cell boundary.
inline Grid make_grid(double X, std::size_t n_cells) {
  if (!(X > 0.0)) throw DomainError("grid: window half-length must be positive");
  if (n_cells < 2) throw DomainError("grid: need at least two cells");
  if (n_cells % 2) ++n_cells;
  Grid g;
  g.X = X;
  g.h = 2.0 * X / static_cast<double>(n_cells);
  g.points.resize(n_cells);
  g.weights.assign(n_cells, g.h);
  for (std::size_t i = 0; i < n_cells; ++i) g.points[i] = -X + (static_cast<double>(i) + 0.5) * g.h;
  return g;
}

inline Grid make_grid(const CouplingProfile& profile, std::size_t n_cells) {
  return make_grid(profile.support(), n_cells);
}

enum class KernelKind { FullK, Q, A, N, L, M, A0, M0, N0Beta };

inline std::string to_string(KernelKind k) {
  switch (k) {
    case KernelKind::FullK: return "K";
    case KernelKind::Q: return "Q";
    case KernelKind::A: return "A";
    case KernelKind::N: return "N";
    case KernelKind::L: return "L";
    case KernelKind::M: return "M";
    case KernelKind::A0: return "A0";
    case KernelKind::M0: return "M0";
    case KernelKind::N0Beta: return "N0beta";
  }
  return "?";
}

struct DiscretizedOperator {
  KernelKind kind = KernelKind::FullK;
  Eigen::MatrixXd matrix;  // |V_i|^{1/2} g_ij V_j^{1/2}
  Eigen::MatrixXd base;    // g_ij, without the perturbation factors
  Eigen::VectorXd row;     // |V_i|^{1/2}
  Eigen::VectorXd col;     // V_j^{1/2} = sgn(V_j) |V_j|^{1/2}
  Grid grid;
  double kappa1 = 0.0;
  double k_sq = 0.0;
  double beta = 1.0;
};

namespace detail {

// Cell-pair averages h^{-1} int_i int_j exp(-kappa |x - x'|) for a uniform grid,
// indexed by the offset m = |i - j|.
inline double cell_exp_diag(double kappa, double h) {
  const double y = kappa * h;
  if (y < 1e-2) {
    return h * (1.0 - y / 3.0 + y * y / 12.0 - y * y * y / 60.0 + y * y * y * y / 360.0 -
                y * y * y * y * y / 2520.0);
  }
  return 2.0 * (y + std::expm1(-y)) / (h * kappa * kappa);
}

inline double cell_exp_offdiag_factor(double kappa, double h) {
  const double e = std::expm1(-kappa * h);
  return e * e / (h * kappa * kappa);
}

inline double cell_exp(double kappa, double h, std::size_t m) {
  if (m == 0) return cell_exp_diag(kappa, h);
  return std::exp(-kappa * static_cast<double>(m - 1) * h) * cell_exp_offdiag_factor(kappa, h);
}

// Toeplitz symbol t_m = sum_{n >= 2} chi_n^2/(2 k_n) E_m(k_n) with
// k_n = beta * sqrt(nu_n - nu_1 + kappa1^2), plus the continuation of the sum
// beyond the basis by its mean density (1/pi) du.
inline std::vector<double> modal_toeplitz(const ModeBasis& basis, double h, std::size_t n,
                                          double kappa1, double beta, double* tail_out = nullptr) {
  std::vector<double> t(n, 0.0);
  const double nu1 = basis.nu1();
  const double k1sq = kappa1 * kappa1;
  for (std::size_t idx = 1; idx < basis.modes.size(); ++idx) {
    const auto& mode = basis.modes[idx];
    if (mode.chi0_sq == 0.0) continue;
    const double kappa = beta * std::sqrt((mode.nu - nu1) + k1sq);
    const double c = mode.chi0_sq / (2.0 * kappa);
    t[0] += c * cell_exp_diag(kappa, h);
    const double g = c * cell_exp_offdiag_factor(kappa, h);
    const double rho = std::exp(-kappa * h);
    double f = g;
    for (std::size_t m = 1; m < n; ++m) {
      t[m] += f;
      f *= rho;
      if (f < 1e-19 * g || f == 0.0) break;
    }
  }
  const double u0 = basis.tail_start_u();
  auto kappa_u = [&](double u) { return beta * std::sqrt(u * u - nu1 + k1sq); };
  double tail0 = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    if (m >= 2 && std::exp(-kappa_u(u0) * static_cast<double>(m - 1) * h) < 1e-30) break;
    const double tail = quad::semi_infinite(
        [&](double u) {
          const double k = kappa_u(u);
          return cell_exp(k, h, m) / (2.0 * k);
        },
        u0) / std::numbers::pi;
    t[m] += tail;
    if (m == 0) tail0 = tail;
  }
  if (tail_out) *tail_out = tail0;
  return t;
}

inline Eigen::MatrixXd toeplitz(const std::vector<double>& t) {
  const auto n = static_cast<Eigen::Index>(t.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = t[static_cast<std::size_t>(std::abs(i - j))];
  return m;
}

// Galerkin Toeplitz symbol for a kernel f(|x - x'|) that is smooth for r > 0.
template <class F>
std::vector<double> galerkin_toeplitz(const F& f, double h, std::size_t n) {
  std::vector<double> t(n);
  t[0] = 2.0 / h * quad::gauss<16>([&](double s) { return (h - s) * f(s); }, 0.0, h);
  for (std::size_t m = 1; m < n; ++m) {
    const double c = static_cast<double>(m) * h;
    t[m] = (quad::gauss<16>([&](double s) { return (h + s) * f(c + s); }, -h, 0.0) +
            quad::gauss<16>([&](double s) { return (h - s) * f(c + s); }, 0.0, h)) /
           h;
  }
  return t;
}

// Galerkin matrix of a symmetric kernel supported on the same-sign quadrants,
// smooth there except across x = x'.
template <class F>
Eigen::MatrixXd galerkin_same_sign(const F& f, const Grid& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  const Eigen::Index half = n / 2;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      if ((i < half) != (j < half)) continue;
      const auto iu = static_cast<std::size_t>(i), ju = static_cast<std::size_t>(j);
      double v;
      if (i == j)
        v = quad::gauss_square_split<8>(f, g.left(iu), g.right(iu));
      else
        v = quad::gauss_rect<8>(f, g.left(iu), g.right(iu), g.left(ju), g.right(ju));
      m(i, j) = m(j, i) = v / g.h;
    }
  }
  return m;
}

}  // namespace detail

/// Cell averages of V on the grid.
inline Eigen::VectorXd cell_averages(const CouplingProfile& profile, const Grid& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  if (auto pieces = profile.pieces()) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double l = g.left(static_cast<std::size_t>(i)), r = g.right(static_cast<std::size_t>(i));
      double s = 0.0;
      for (const auto& pc : *pieces) {
        const double lo = std::max(l, pc.lo), hi = std::min(r, pc.hi);
        if (hi > lo) s += pc.value * (hi - lo);
      }
      v(i) = s / g.h;
    }
  } else {
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto iu = static_cast<std::size_t>(i);
      v(i) = quad::gauss<8>([&](double x) { return profile.delta(x); }, g.left(iu), g.right(iu)) / g.h;
    }
  }
  return v;
}

/// Pointwise kernel K(x, x'; k) for x != x'.  The mode sum is continued past
/// the basis by its asymptotic density; `tail` receives that contribution.
inline double kernel_full(double x, double xp, double k_sq, const ModeBasis& basis,
                          const CouplingProfile& profile, double* tail = nullptr) {
  if (!(k_sq < basis.nu1())) throw DomainError("spectral parameter above threshold");
  const double r = std::abs(x - xp);
  if (r == 0.0) throw DomainError("kernel_full: diagonal x = x' is singular");
  const double vx = profile.delta(x), vxp = profile.delta(xp);
  if (vx == 0.0 || vxp == 0.0) {
    if (tail) *tail = 0.0;
    return 0.0;
  }
  const double pre = std::sqrt(std::abs(vx)) * std::copysign(std::sqrt(std::abs(vxp)), vxp);
  double s = 0.0;
  for (const auto& mode : basis.modes) {
    if (mode.chi0_sq == 0.0) continue;
    const double kappa = std::sqrt(mode.nu - k_sq);
    s += mode.chi0_sq / (2.0 * kappa) * std::exp(-kappa * r);
  }
  const double u0 = basis.tail_start_u();
  double t = 0.0;
  if (std::exp(-std::sqrt(std::max(u0 * u0 - k_sq, 0.0)) * r) > 1e-30) {
    t = quad::semi_infinite(
            [&](double u) {
              const double kappa = std::sqrt(u * u - k_sq);
              return std::exp(-kappa * r) / (2.0 * kappa);
            },
            u0) /
        std::numbers::pi;
  }
  if (tail) *tail = pre * t;
  return pre * (s + t);
}

/// Assembles the discretised kernels of one profile on one grid.
class KernelAssembler {
 public:
  KernelAssembler(const ModeBasis& basis, const CouplingProfile& profile, Grid grid)
      : basis_(&basis), grid_(std::move(grid)) {
    if (basis.n_max() < 2) throw DomainError("kernel assembly needs at least two modes");
    cell_delta_ = cell_averages(profile, grid_);
    row_ = cell_delta_.cwiseAbs().cwiseSqrt();
    col_ = row_;
    for (Eigen::Index i = 0; i < col_.size(); ++i)
      if (cell_delta_(i) < 0.0) col_(i) = -col_(i);
  }

  const Grid& grid() const { return grid_; }
  const ModeBasis& basis() const { return *basis_; }
  const Eigen::VectorXd& cell_delta() const { return cell_delta_; }
  const Eigen::VectorXd& row_factor() const { return row_; }
  const Eigen::VectorXd& col_factor() const { return col_; }

  /// h^{-1/2} int_cell exp(-kappa |x|) dx.
  Eigen::VectorXd exp_cell_vector(double kappa) const {
    const auto n = static_cast<Eigen::Index>(grid_.size());
    Eigen::VectorXd q(n);
    const double h = grid_.h;
    const double w = kappa > 0.0 ? -std::expm1(-kappa * h) / kappa : h;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto iu = static_cast<std::size_t>(i);
      const double near = std::min(std::abs(grid_.left(iu)), std::abs(grid_.right(iu)));
      q(i) = std::exp(-kappa * near) * w / std::sqrt(h);
    }
    return q;
  }

  /// Kernel matrix g_ij of the requested kind, without perturbation factors.
  Eigen::MatrixXd base(KernelKind kind, double kappa1, double beta = 1.0) const {
    const std::size_t n = grid_.size();
    const double h = grid_.h;
    const double chi1 = basis_->chi1_sq();
    const bool needs_kappa = kind == KernelKind::FullK || kind == KernelKind::Q || kind == KernelKind::L;
    if (needs_kappa && !(kappa1 > 0.0))
      throw DomainError("rank-one part diverges at threshold (kappa1 must be > 0)");
    if (kappa1 < 0.0) throw DomainError("kappa1 must be non-negative");
    if (kind == KernelKind::N0Beta && !(beta > 0.0)) throw DomainError("beta must be positive");

    switch (kind) {
      case KernelKind::FullK: {
        auto t = detail::modal_toeplitz(*basis_, h, n, kappa1, 1.0);
        const double c = chi1 / (2.0 * kappa1);
        for (std::size_t m = 0; m < n; ++m) t[m] += c * detail::cell_exp(kappa1, h, m);
        return detail::toeplitz(t);
      }
      case KernelKind::N:
        return detail::toeplitz(detail::modal_toeplitz(*basis_, h, n, kappa1, 1.0));
      case KernelKind::N0Beta:
        return detail::toeplitz(detail::modal_toeplitz(*basis_, h, n, 0.0, beta));
      case KernelKind::Q: {
        const Eigen::VectorXd q = exp_cell_vector(kappa1);
        return chi1 / (2.0 * kappa1) * q * q.transpose();
      }
      case KernelKind::L: {
        const auto nn = static_cast<Eigen::Index>(n);
        return Eigen::MatrixXd::Constant(nn, nn, chi1 / (2.0 * kappa1) * h);
      }
      case KernelKind::A: {
        if (kappa1 == 0.0) return base(KernelKind::A0, 0.0);
        // (1/kappa) e^{-kappa |x|>} sinh(kappa |x|<) on same-sign quadrants,
        // written as e^{-kappa|x-x'|} (1 - e^{-2 kappa min}) / (2 kappa).
        auto f = [&](double x, double xp) {
          const double lo = std::min(std::abs(x), std::abs(xp));
          return chi1 * std::exp(-kappa1 * std::abs(x - xp)) * (-std::expm1(-2.0 * kappa1 * lo)) /
                 (2.0 * kappa1);
        };
        return detail::galerkin_same_sign(f, grid_);
      }
      case KernelKind::A0: {
        auto f = [&](double x, double xp) { return chi1 * std::min(std::abs(x), std::abs(xp)); };
        return detail::galerkin_same_sign(f, grid_);
      }
      case KernelKind::M: {
        if (kappa1 == 0.0) return base(KernelKind::M0, 0.0);
        auto f = [&](double r) { return chi1 * std::expm1(-kappa1 * r) / (2.0 * kappa1); };
        return detail::toeplitz(detail::galerkin_toeplitz(f, h, n));
      }
      case KernelKind::M0: {
        auto f = [&](double r) { return -0.5 * chi1 * r; };
        return detail::toeplitz(detail::galerkin_toeplitz(f, h, n));
      }
    }
    throw InternalError("unknown kernel kind");
  }

  DiscretizedOperator assemble(KernelKind kind, double kappa1, double beta = 1.0) const {
    DiscretizedOperator op;
    op.kind = kind;
    op.base = base(kind, kappa1, beta);
    op.matrix = row_.asDiagonal() * op.base * col_.asDiagonal();
    op.row = row_;
    op.col = col_;
    op.grid = grid_;
    op.kappa1 = kappa1;
    op.k_sq = basis_->nu1() - kappa1 * kappa1;
    op.beta = beta;
    return op;
  }

 private:
  const ModeBasis* basis_;
  Grid grid_;
  Eigen::VectorXd cell_delta_;
  Eigen::VectorXd row_;
  Eigen::VectorXd col_;
};

/// Assemble by spectral parameter k^2 < nu_1.
inline DiscretizedOperator assemble(KernelKind kind, double k_sq, const ModeBasis& basis,
                                    const CouplingProfile& profile, const Grid& grid,
                                    double beta = 1.0) {
  const double nu1 = basis.nu1();
  const bool kappa_free = kind == KernelKind::A0 || kind == KernelKind::M0 || kind == KernelKind::N0Beta;
  if (!kappa_free && k_sq > nu1) throw DomainError("spectral parameter above threshold");
  const double kappa1 = kappa_free ? 0.0 : std::sqrt(std::max(nu1 - k_sq, 0.0));
  return KernelAssembler(basis, profile, grid).assemble(kind, kappa1, beta);
}

/// Hilbert-Schmidt norm of the projected operator.
inline double hs_norm(const DiscretizedOperator& op) { return op.matrix.norm(); }
inline double hs_norm(const Eigen::MatrixXd& m) { return m.norm(); }

/// Real eigenvalues (ascending) of a discretised K-type operator.  For a
/// sign-definite perturbation the matrix itself is symmetric; otherwise the
/// spectrum is computed from the congruent form L^T diag(V) L with
/// base = L L^T, which requires a positive definite base (true for K).
inline Eigen::VectorXd bs_spectrum(const DiscretizedOperator& op) {
  bool pos = false, neg = false;
  for (Eigen::Index i = 0; i < op.col.size(); ++i) {
    if (op.col(i) > 0.0) pos = true;
    if (op.col(i) < 0.0) neg = true;
  }
  if (!(pos && neg)) {
    const Eigen::MatrixXd sym = 0.5 * (op.matrix + op.matrix.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
  }
  Eigen::LLT<Eigen::MatrixXd> llt(op.base);
  if (llt.info() != Eigen::Success)
    throw InternalError("bs_spectrum: kernel is not positive definite for a mixed-sign profile");
  const Eigen::MatrixXd L = llt.matrixL();
  const Eigen::VectorXd v = op.row.cwiseProduct(op.col);
  Eigen::MatrixXd c = L.transpose() * v.asDiagonal() * L;
  c = 0.5 * (c + c.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

}  // namespace waveguide
