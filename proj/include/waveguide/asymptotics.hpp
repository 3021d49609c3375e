#pragma once

// Weak-coupling coefficients of the ground state.  With V = alpha - alpha0
// (unit coupling and scale) and kt_n = sqrt(nu_n - nu_1):
//
//   sqrt(nu_1 - E(lambda)) = c1 lambda + c2 lambda^2 + O(lambda^3),
//     c1 = -(1/2) chi_1^2 int V,
//     c2 = -(1/4) chi_1^4 IM + (1/4) chi_1^2 sum_{n>=2} chi_n^2 I_n(1),
//   sqrt(nu_1 - E(sigma)) = c1 sigma + sigma^2 c2s(sigma) + O(sigma^3),
//     c2s(sigma) = (1/4) chi_1^2 sum_{n>=2} chi_n^2 I_n(sigma),
//
// where IM = int int V(x) |x - x'| V(x') and
// I_n(s) = int int V(x) exp(-s kt_n |x - x'|) / kt_n V(x').  The exponential in
// I_n(sigma) is kept as it stands; expanding it in sigma would produce a
// divergent mode sum.  The scaled coefficient has no IM contribution.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "waveguide/bskernel.hpp"
#include "waveguide/errors.hpp"
#include "waveguide/profile.hpp"
#include "waveguide/transverse.hpp"

namespace waveguide {

struct ExpansionCoefficients {
  double c1_lambda = 0.0;
  double c2_lambda = 0.0;
  double c1_sigma = 0.0;
  double c2_sigma = 0.0;  // c2s(sigma) at `sigma`
  double sigma = 1.0;
  double c_our_result = 0.0;  // E = nu_1 - c lambda^2 + O(lambda^3)
  double m0_term = 0.0;       // -(1/4) chi_1^4 IM
  double mode_sum_term = 0.0; // (1/4) chi_1^2 sum chi_n^2 I_n at the relevant scale
  std::size_t n_max = 0;
  double tail_estimate = 0.0; // contribution of modes beyond the basis (density continuation)

  /// Predicted sqrt(nu_1 - E) to first and second order.
  double kappa_lambda(double lambda, int order) const {
    return order <= 1 ? c1_lambda * lambda : c1_lambda * lambda + c2_lambda * lambda * lambda;
  }
  double kappa_sigma(int order) const {
    return order <= 1 ? c1_sigma * sigma : c1_sigma * sigma + c2_sigma * sigma * sigma;
  }
};

namespace detail {

// Pairwise double integrals over pieces of a piecewise-constant V.
inline double pair_exp_integral(const Piece& p, const Piece& q, double k) {
  const double L1 = p.hi - p.lo, L2 = q.hi - q.lo;
  if (p.lo == q.lo && p.hi == q.hi) {
    const double y = k * L1;
    if (y < 1e-3) return L1 * L1 * (1.0 - y / 3.0 + y * y / 12.0 - y * y * y / 60.0);
    return 2.0 * (y + std::expm1(-y)) / (k * k);
  }
  const Piece& l = p.hi <= q.lo ? p : q;
  const Piece& r = p.hi <= q.lo ? q : p;
  if (l.hi > r.lo) throw DomainError("profile pieces must not overlap");
  auto f = [&](double L) { return k * L < 1e-12 ? L : -std::expm1(-k * L) / k; };
  return std::exp(-k * (r.lo - l.hi)) * f(L1) * f(L2);
}

inline double pair_abs_integral(const Piece& p, const Piece& q) {
  const double L1 = p.hi - p.lo, L2 = q.hi - q.lo;
  if (p.lo == q.lo && p.hi == q.hi) return L1 * L1 * L1 / 3.0;
  const double m1 = 0.5 * (p.lo + p.hi), m2 = 0.5 * (q.lo + q.hi);
  return L1 * L2 * std::abs(m2 - m1);
}

// Quadratic forms W(k) = int int V exp(-k|x - x'|) V and IM for a profile.
class QuadraticForms {
 public:
  explicit QuadraticForms(const CouplingProfile& v, std::size_t sampled_cells = 2048) {
    if (auto p = v.pieces()) {
      pieces_ = *p;
      return;
    }
    const Grid g = make_grid(v, sampled_cells);
    h_ = g.h;
    const Eigen::VectorXd c = cell_averages(v, g);
    const auto n = static_cast<std::size_t>(c.size());
    auto_.assign(n, 0.0);
    for (std::size_t m = 0; m < n; ++m) {
      double s = 0.0;
      for (std::size_t i = 0; i + m < n; ++i)
        s += c(static_cast<Eigen::Index>(i)) * c(static_cast<Eigen::Index>(i + m));
      auto_[m] = m ? 2.0 * s : s;
    }
  }

  double exp_form(double k) const {
    if (!pieces_.empty()) {
      double s = 0.0;
      for (const auto& p : pieces_)
        for (const auto& q : pieces_) s += p.value * q.value * pair_exp_integral(p, q, k);
      return s;
    }
    double s = auto_[0] * cell_exp_diag(k, h_);
    const double g = cell_exp_offdiag_factor(k, h_);
    const double rho = std::exp(-k * h_);
    double f = g;
    for (std::size_t m = 1; m < auto_.size(); ++m) {
      s += auto_[m] * f;
      f *= rho;
      if (f < 1e-19 * g) break;
    }
    return s * h_;
  }

  double abs_form() const {
    if (!pieces_.empty()) {
      double s = 0.0;
      for (const auto& p : pieces_)
        for (const auto& q : pieces_) s += p.value * q.value * pair_abs_integral(p, q);
      return s;
    }
    const auto t = galerkin_toeplitz([](double r) { return r; }, h_, auto_.size());
    double s = 0.0;
    for (std::size_t m = 0; m < auto_.size(); ++m) s += auto_[m] * t[m];
    return s * h_;
  }

 private:
  std::vector<Piece> pieces_;
  std::vector<double> auto_;  // autocorrelation of cell averages by offset
  double h_ = 0.0;
};

// sum_{n>=2} chi_n^2 I_n(s), continued beyond the basis by the mean density.
inline double mode_sum(const ModeBasis& basis, const QuadraticForms& qf, double s, double* tail) {
  const double nu1 = basis.nu1();
  double sum = 0.0;
  for (std::size_t i = 1; i < basis.modes.size(); ++i) {
    const auto& m = basis.modes[i];
    if (m.chi0_sq == 0.0) continue;
    const double kt = std::sqrt(m.nu - nu1);
    sum += m.chi0_sq * qf.exp_form(s * kt) / kt;
  }
  const double u0 = basis.tail_start_u();
  const double t = quad::semi_infinite(
                       [&](double u) {
                         const double kt = std::sqrt(u * u - nu1);
                         return qf.exp_form(s * kt) / kt;
                       },
                       u0) /
                   std::numbers::pi;
  if (tail) *tail = t;
  return sum + t;
}

inline void require_expandable(const CouplingProfile& profile, bool second_moment) {
  const Integrability in = profile.integrability();
  if (!in.a2 || (second_moment && !in.a2_prime))
    throw DomainError("profile is not integrable enough for the weak-coupling expansion");
}

}  // namespace detail

/// Coefficients of the lambda-expansion for the profile taken at unit
/// coupling (its scale sigma is kept).
inline ExpansionCoefficients weak_coupling_expansion(const CouplingProfile& profile,
                                                     const ModeBasis& basis) {
  detail::require_expandable(profile, false);
  const CouplingProfile v = profile.with_lambda(1.0);
  ExpansionCoefficients c;
  c.n_max = basis.n_max();
  if (v.is_zero()) return c;
  const double chi1 = basis.chi1_sq();
  const detail::QuadraticForms qf(v);
  c.c1_lambda = -0.5 * chi1 * v.integral();
  c.c1_sigma = c.c1_lambda;
  c.m0_term = -0.25 * chi1 * chi1 * qf.abs_form();
  c.mode_sum_term = 0.25 * chi1 * detail::mode_sum(basis, qf, 1.0, &c.tail_estimate);
  c.tail_estimate *= 0.25 * chi1;
  c.c2_lambda = c.m0_term + c.mode_sum_term;
  c.c2_sigma = c.mode_sum_term;
  c.c_our_result = c.c1_lambda > 0.0 ? c.c1_lambda * c.c1_lambda : 0.0;
  return c;
}

/// Coefficients of the sigma-expansion of the bare profile (unit coupling,
/// unit scale) evaluated at scale sigma.
inline ExpansionCoefficients scaled_expansion(const CouplingProfile& profile, const ModeBasis& basis,
                                              double sigma) {
  if (!(sigma > 0.0) || !(sigma <= 1.0)) throw DomainError("sigma must lie in (0, 1]");
  detail::require_expandable(profile, true);
  const CouplingProfile v = profile.bare();
  ExpansionCoefficients c;
  c.n_max = basis.n_max();
  c.sigma = sigma;
  if (v.is_zero()) return c;
  const double chi1 = basis.chi1_sq();
  const detail::QuadraticForms qf(v);
  c.c1_sigma = -0.5 * chi1 * v.integral();
  c.c1_lambda = c.c1_sigma;
  c.mode_sum_term = 0.25 * chi1 * detail::mode_sum(basis, qf, sigma, &c.tail_estimate);
  c.tail_estimate *= 0.25 * chi1;
  c.c2_sigma = c.mode_sum_term;
  c.m0_term = -0.25 * chi1 * chi1 * qf.abs_form();
  c.c2_lambda = c.m0_term + 0.25 * chi1 * detail::mode_sum(basis, qf, 1.0, nullptr);
  c.c_our_result = c.c1_lambda > 0.0 ? c.c1_lambda * c.c1_lambda : 0.0;
  return c;
}

struct ExistenceCriterion {
  bool exists = false;
  double integral = 0.0;
  bool boundary_case = false;  // |int V| within the quadrature tolerance band
};

/// A weakly coupled state exists for all small lambda iff int (alpha - alpha0) <= 0.
inline ExistenceCriterion existence_criterion_report(const CouplingProfile& profile) {
  ExistenceCriterion r;
  const CouplingProfile v = profile.with_lambda(1.0);
  r.integral = v.integral();
  const double band = 1e-12 * std::max(1.0, v.l1_norm());
  r.boundary_case = std::abs(r.integral) <= band;
  r.exists = r.boundary_case || r.integral < 0.0;
  return r;
}

inline bool existence_criterion(const CouplingProfile& profile) {
  return existence_criterion_report(profile).exists;
}

struct DirichletProbeRow {
  double alpha0 = 0.0;
  double chi1_sq = 0.0;
  double first_term = 0.0;   // sigma c1
  double second_term = 0.0;  // sigma^2 c2s(sigma)
};

/// Diagnostic sweep towards a Dirichlet barrier pierced by a window: alpha = 0
/// on |x| < half_width and alpha0 elsewhere, for growing alpha0.  Only trends
/// are reported; no statement about the limit is made.
inline std::vector<DirichletProbeRow> dirichlet_limit_probe(const Geometry& g, double half_width,
                                                            double sigma,
                                                            const std::vector<double>& alpha0s,
                                                            std::size_t n_modes) {
  std::vector<DirichletProbeRow> rows;
  for (double a0 : alpha0s) {
    const ModeBasis basis = solve_modes(g, a0, n_modes);
    const CouplingProfile window(a0, RectWell{half_width, 0.0});
    const auto c = scaled_expansion(window, basis, sigma);
    rows.push_back({a0, basis.chi1_sq(), sigma * c.c1_sigma, sigma * sigma * c.c2_sigma});
  }
  return rows;
}

}  // namespace waveguide
