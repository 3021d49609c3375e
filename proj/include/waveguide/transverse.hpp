#pragma once

// Transverse eigenproblem of the unperturbed double guide: -chi'' on (-d2, d1)
// with Dirichlet ends and a point interaction of strength alpha0 at y = 0,
// i.e. chi continuous at 0 and chi'(0+) - chi'(0-) = alpha0 * chi(0).
//
// With chi(y) = sin(u (d1 - y)) * sin(u d2) for y > 0 and
// chi(y) = sin(u (y + d2)) * sin(u d1) for y < 0, the jump condition reads
//
//     u sin(u d1) cos(u d2) + u cos(u d1) sin(u d2) + alpha0 sin(u d1) sin(u d2) = 0,
//
// equivalently  -u cot(u d1) - u cot(u d2) = alpha0  away from the poles.  The
// left-hand side is strictly increasing between consecutive points of
// {m pi / d1} u {m pi / d2}, which gives exactly one root per interval.  Points
// common to both families are eigenvalues with chi(0) = 0.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "waveguide/errors.hpp"

namespace waveguide {

struct Geometry {
  double d1 = 1.0;
  double d2 = 1.0;

  Geometry() = default;
  Geometry(double upper, double lower) : d1(upper), d2(lower) {
    if (!(d1 > 0.0) || !(d2 > 0.0) || !std::isfinite(d1) || !std::isfinite(d2))
      throw DomainError("geometry: half-widths must be positive and finite");
  }

  double width() const { return d1 + d2; }
  bool operator==(const Geometry&) const = default;
};

struct TransverseMode {
  int index = 0;
  double nu = 0.0;       // transverse eigenvalue
  double chi0_sq = 0.0;  // |chi_n(0)|^2 of the L2-normalised eigenfunction

  /// Decay rate sqrt(nu - k^2); requires k^2 < nu.
  double kappa_of(double k_sq) const {
    if (!(k_sq < nu)) throw DomainError("spectral parameter above threshold");
    return std::sqrt(nu - k_sq);
  }
};

struct ModeBasis {
  Geometry geometry;
  double alpha0 = 0.0;
  std::vector<TransverseMode> modes;

  std::size_t n_max() const { return modes.size(); }
  double nu1() const { return modes.front().nu; }
  double chi1_sq() const { return modes.front().chi0_sq; }

  /// Asymptotic mode density in u = sqrt(nu): D / pi.  The continuation point
  /// for tail integrals sits half a spacing above the last computed mode.
  double tail_start_u() const {
    const double last = modes.back().nu;
    return std::sqrt(std::max(last, 0.0)) + 0.5 * std::numbers::pi / geometry.width();
  }
};

namespace detail {

// x cot x and x coth x with their small-argument series.
inline double x_cot_x(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 3.0 - x2 * x2 / 45.0;
  }
  return x / std::tan(x);
}

inline double x_coth_x(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 + x2 / 3.0 - x2 * x2 / 45.0;
  }
  return x / std::tanh(x);
}

// Eigenvalue condition as a function of nu: response(nu) = alpha0.
// For nu > 0 this is -u cot(u d1) - u cot(u d2), for nu < 0 the hyperbolic
// continuation -v coth(v d1) - v coth(v d2); both are increasing in nu.
inline double response(double nu, const Geometry& g) {
  if (nu >= 0.0) {
    const double u = std::sqrt(nu);
    return -x_cot_x(u * g.d1) / g.d1 - x_cot_x(u * g.d2) / g.d2;
  }
  const double v = std::sqrt(-nu);
  return -x_coth_x(v * g.d1) / g.d1 - x_coth_x(v * g.d2) / g.d2;
}

// rho(u, d) = (norm^2 of the arm) / (value at 0)^2 for the arm sin(u(d - y)),
// i.e. (2x - sin 2x) / (4 u sin^2 x) with x = u d.  chi(0)^2 = 1/(rho1 + rho2).
inline double arm_ratio(double nu, double d) {
  if (nu >= 0.0) {
    const double u = std::sqrt(nu);
    const double x = u * d;
    if (x < 1e-3) return d / 3.0 * (1.0 + 2.0 * x * x / 15.0);
    const double s = std::sin(x);
    return (2.0 * x - std::sin(2.0 * x)) / (4.0 * u * s * s);
  }
  const double v = std::sqrt(-nu);
  const double x = v * d;
  if (x < 1e-3) return d / 3.0 * (1.0 - 2.0 * x * x / 15.0);
  // (sinh 2x - 2x) / sinh^2 x = 2 coth x - 2x / sinh^2 x, stable for large x.
  const double sh = x < 350.0 ? std::sinh(x) : std::numeric_limits<double>::infinity();
  return (2.0 / std::tanh(x) - 2.0 * x / (sh * sh)) / (4.0 * v);
}

inline double chi0_squared(double nu, const Geometry& g) {
  return 1.0 / (arm_ratio(nu, g.d1) + arm_ratio(nu, g.d2));
}

// Safeguarded Newton for -u cot(u d1) - u cot(u d2) - alpha0 on the open
// interval (lo, hi) between consecutive poles.  The function runs from -inf to
// +inf and its derivative is 2u (rho1 + rho2) > 0.
inline double root_between_poles(double lo, double hi, const Geometry& g, double alpha0) {
  auto f = [&](double u) {
    return -u / std::tan(u * g.d1) - u / std::tan(u * g.d2) - alpha0;
  };
  auto df = [&](double u) {
    const double nu = u * u;
    return 2.0 * u * (arm_ratio(nu, g.d1) + arm_ratio(nu, g.d2));
  };
  double a = lo, b = hi;
  double u = 0.5 * (a + b);
  for (int it = 0; it < 200; ++it) {
    const double fu = f(u);
    if (fu == 0.0) return u;
    if (fu < 0.0) a = u; else b = u;
    const double step = fu / df(u);
    double next = u - step;
    if (!(next > a && next < b) || !std::isfinite(next)) next = 0.5 * (a + b);
    if (std::abs(next - u) <= 1e-15 * u || (b - a) <= 2e-16 * b) return next;
    u = next;
  }
  std::ostringstream os;
  os << "transverse root failed to converge in (" << lo << ", " << hi << ")";
  throw InternalError(os.str());
}

}  // namespace detail

/// Secular function f(u) = u sin(uD) + alpha0 sin(u d1) sin(u d2); its positive
/// zeros are the square roots of the positive transverse eigenvalues.
inline double secular_residual(double u, const Geometry& g, double alpha0) {
  if (!(u > 0.0) || !std::isfinite(u)) throw DomainError("secular_residual: u must be positive");
  return u * std::sin(u * g.width()) + alpha0 * std::sin(u * g.d1) * std::sin(u * g.d2);
}

/// h_j(u) = sqrt(u) |sin(d u)| / sqrt(2 d u - sin(2 d u)), bounded on (0, inf).
/// At u = 0 the continuous extension sqrt(3 / (4 d)) is returned.
inline double h_bound(double u, double d) {
  if (!(u >= 0.0) || !(d > 0.0)) throw DomainError("h_bound: need u >= 0 and d > 0");
  const double x = u * d;
  if (x < 1e-3) return std::sqrt(3.0 / (4.0 * d)) * (1.0 - x * x / 15.0);
  return std::sqrt(u) * std::abs(std::sin(x)) / std::sqrt(2.0 * x - std::sin(2.0 * x));
}

/// First n_max transverse modes, sorted by eigenvalue.
inline ModeBasis solve_modes(const Geometry& g, double alpha0, std::size_t n_max) {
  if (n_max < 2) throw DomainError("solve_modes: n_max must be at least 2");
  if (!std::isfinite(alpha0)) throw DomainError("solve_modes: alpha0 must be finite");
  constexpr double pi = std::numbers::pi;

  ModeBasis basis;
  basis.geometry = g;
  basis.alpha0 = alpha0;
  basis.modes.reserve(n_max);

  auto push = [&](double nu, double chi0_sq) {
    TransverseMode m;
    m.index = static_cast<int>(basis.modes.size()) + 1;
    m.nu = nu;
    m.chi0_sq = chi0_sq;
    basis.modes.push_back(m);
  };

  // Pole sequence {m pi/d1} u {m pi/d2}, merged; coincident points flagged.
  long m1 = 1, m2 = 1;
  auto next_pole = [&](bool& common) {
    const double p1 = m1 * pi / g.d1;
    const double p2 = m2 * pi / g.d2;
    if (std::abs(p1 - p2) <= 1e-12 * std::max(p1, p2)) {
      common = true;
      ++m1;
      ++m2;
      return 0.5 * (p1 + p2);
    }
    common = false;
    if (p1 < p2) {
      ++m1;
      return p1;
    }
    ++m2;
    return p2;
  };

  // Ground mode: bisection in nu on (nu_low, p1^2); response(nu) is monotone
  // through nu = 0, so bound transverse states (nu < 0) need no special casing.
  bool common = false;
  double pole = next_pole(common);
  {
    double lo = -std::pow(std::max(0.0, -alpha0), 2) - 1.0;
    double hi = pole * pole * (1.0 - 1e-15);
    while (detail::response(lo, g) > alpha0) lo *= 4.0;
    for (int it = 0; it < 400 && hi - lo > 4e-16 * std::max(std::abs(lo), std::abs(hi)); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      (detail::response(mid, g) < alpha0 ? lo : hi) = mid;
    }
    const double nu = 0.5 * (lo + hi);
    push(nu, detail::chi0_squared(nu, g));
  }

  while (basis.modes.size() < n_max) {
    if (common) push(pole * pole, 0.0);
    if (basis.modes.size() >= n_max) break;
    bool next_common = false;
    const double next = next_pole(next_common);
    const double u = detail::root_between_poles(pole, next, g, alpha0);
    push(u * u, detail::chi0_squared(u * u, g));
    pole = next;
    common = next_common;
  }
  return basis;
}

/// Mode count sufficient for kernels resolved on cells of width h: the last
/// mode satisfies kappa_n * h >~ 30, beyond which the tail integral is used.
inline std::size_t recommended_mode_count(const Geometry& g, double cell_width,
                                          std::size_t floor = 2000,
                                          std::size_t cap = 200000) {
  const double n = 30.0 * g.width() / (std::numbers::pi * cell_width);
  return std::clamp(static_cast<std::size_t>(std::ceil(n)), floor, cap);
}

}  // namespace waveguide
