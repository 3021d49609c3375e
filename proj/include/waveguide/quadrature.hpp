#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>

namespace waveguide::quad {

/// Full Gauss-Legendre rule on [-1, 1] (Boost stores only the non-negative half).
template <std::size_t N>
struct GaussLegendre {
  std::array<double, N> nodes{};
  std::array<double, N> weights{};

  GaussLegendre() {
    using half = boost::math::quadrature::gauss<double, N>;
    const auto& x = half::abscissa();
    const auto& w = half::weights();
    std::size_t k = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] == 0.0) continue;
      nodes[k] = -x[i];
      weights[k] = w[i];
      ++k;
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
      nodes[k] = x[i];
      weights[k] = w[i];
      ++k;
    }
  }

  static const GaussLegendre& get() {
    static const GaussLegendre rule;
    return rule;
  }
};

/// Integral of f over [a, b] with an N-point Gauss rule.
template <std::size_t N = 16, class F>
double gauss(const F& f, double a, double b) {
  const auto& r = GaussLegendre<N>::get();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double s = 0.0;
  for (std::size_t i = 0; i < N; ++i) s += r.weights[i] * f(mid + half * r.nodes[i]);
  return s * half;
}

/// Integral of f(x, x') over the square [a,b]^2 for a kernel that is smooth on
/// each side of the diagonal x = x' but may have a kink across it.
/// The two triangles are integrated separately with a collapsed-coordinate map.
template <std::size_t N = 8, class F>
double gauss_square_split(const F& f, double a, double b) {
  const auto& r = GaussLegendre<N>::get();
  const double h = b - a;
  double s = 0.0;
  // Lower triangle x' < x:  x = a + h*s1, x' = a + h*s1*t, Jacobian h^2 * s1.
  for (std::size_t i = 0; i < N; ++i) {
    const double s1 = 0.5 * (1.0 + r.nodes[i]);
    const double x = a + h * s1;
    for (std::size_t j = 0; j < N; ++j) {
      const double t = 0.5 * (1.0 + r.nodes[j]);
      const double xp = a + h * s1 * t;
      const double w = 0.25 * r.weights[i] * r.weights[j] * s1;
      s += w * (f(x, xp) + f(xp, x));
    }
  }
  return s * h * h;
}

/// Tensor Gauss rule over the rectangle [a,b] x [c,d] for a smooth integrand.
template <std::size_t N = 8, class F>
double gauss_rect(const F& f, double a, double b, double c, double d) {
  const auto& r = GaussLegendre<N>::get();
  const double hx = 0.5 * (b - a), mx = 0.5 * (a + b);
  const double hy = 0.5 * (d - c), my = 0.5 * (c + d);
  double s = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double x = mx + hx * r.nodes[i];
    double row = 0.0;
    for (std::size_t j = 0; j < N; ++j) row += r.weights[j] * f(x, my + hy * r.nodes[j]);
    s += r.weights[i] * row;
  }
  return s * hx * hy;
}

/// Integral of f over [a, inf) for an integrand decaying at least like x^-2.
/// Abscissae beyond 1e100 contribute below double precision and are skipped,
/// which keeps integrands built from squares and cubes of x from overflowing.
template <class F>
double semi_infinite(const F& f, double a) {
  thread_local boost::math::quadrature::exp_sinh<double> integrator;
  auto g = [&](double x) { return x > 1e100 ? 0.0 : f(x); };
  return integrator.integrate(g, a, std::numeric_limits<double>::infinity());
}

}  // namespace waveguide::quad
