#pragma once

// Upper bounds on the number of bound states below nu_1.
//
// SKN bound.  With gamma the negative part of alpha - alpha0 and
//     p(r) = (chi_1^2 / 2) r - sum_{n>=2} chi_n^2 exp(-kt_n r) / (2 kt_n),
// the four-fold integral bound equals 1 + B / ||gamma||_1^2 with
//     B = ||gamma||_1^2 T1 + Ip^2 - 2 ||gamma||_1 T3,
//     T1 = int int gamma gamma p(x - x')^2,   Ip = int int gamma gamma p(x - x'),
//     T3 = int gamma(x) (int p(x - y) gamma(y) dy)^2 dx.
// T1 and Ip are one-dimensional integrals against the autocorrelation of
// gamma; T3 needs only the primitive of p.  The logarithmic singularity of
// the mode sum at r = 0 is resolved by geometric grading.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "waveguide/bskernel.hpp"
#include "waveguide/errors.hpp"
#include "waveguide/profile.hpp"
#include "waveguide/quadrature.hpp"
#include "waveguide/spectrum.hpp"
#include "waveguide/transverse.hpp"

namespace waveguide {

enum class SknStrategy { Quadrature, MonteCarlo };

struct SknResult {
  double value = 1.0;          // 1 + correction
  double error = 0.0;          // mode-truncation change (quadrature) or standard error (Monte Carlo)
  std::size_t n_modes = 0;
  std::size_t samples = 0;
};

struct CountBounds {
  double skn_general = 0.0;
  double skn_rectwell = 0.0;
  int bracketing_upper = 0;
  int bracketing_lower = 0;
  double schatten1 = 0.0;
  double schatten2 = 0.0;
};

namespace detail {

// The comparison kernel p(r) of the SKN bound, using the first n_use modes and
// the density continuation beyond them.
class SknKernel {
 public:
  SknKernel(const ModeBasis& basis, std::size_t n_use) {
    n_use = std::clamp<std::size_t>(n_use, 2, basis.n_max());
    nu1_ = basis.nu1();
    c_lin_ = 0.5 * basis.chi1_sq();
    for (std::size_t i = 1; i < n_use; ++i) {
      const auto& m = basis.modes[i];
      if (m.chi0_sq == 0.0) continue;
      const double kt = std::sqrt(m.nu - nu1_);
      k_.push_back(kt);
      w_.push_back(m.chi0_sq / (2.0 * kt));
    }
    const double last = basis.modes[n_use - 1].nu;
    u0_ = std::sqrt(last) + 0.5 * std::numbers::pi / basis.geometry.width();
  }

  double value(double r) const {
    r = std::abs(r);
    double s = 0.0;
    for (std::size_t i = 0; i < k_.size(); ++i) s += w_[i] * std::exp(-k_[i] * r);
    return c_lin_ * r - s - tail([&](double k) { return std::exp(-k * r) / (2.0 * k); }, r);
  }

  /// int_0^s p(|t|) dt, odd in s.
  double primitive(double s) const {
    const double a = std::abs(s);
    if (a == 0.0) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < k_.size(); ++i) sum += w_[i] * (-std::expm1(-k_[i] * a)) / k_[i];
    const double t = tail([&](double k) { return -std::expm1(-k * a) / (2.0 * k * k); }, 0.0);
    const double v = 0.5 * c_lin_ * a * a - sum - t;
    return s < 0.0 ? -v : v;
  }

 private:
  template <class F>
  double tail(const F& f, double r) const {
    const double k0 = std::sqrt(u0_ * u0_ - nu1_);
    if (r > 0.0 && k0 * r > 700.0) return 0.0;
    return quad::semi_infinite([&](double u) { return f(std::sqrt(u * u - nu1_)); }, u0_) /
           std::numbers::pi;
  }

  double nu1_ = 0.0, c_lin_ = 0.0, u0_ = 0.0;
  std::vector<double> k_, w_;
};

// gamma as positive pieces (cell approximation for sampled profiles).
inline std::vector<Piece> gamma_pieces(const CouplingProfile& profile, std::size_t cells = 256) {
  const CouplingProfile neg = profile.negative_part();
  std::vector<Piece> out;
  if (auto p = neg.pieces()) {
    for (const auto& pc : *p)
      if (pc.value < 0.0) out.push_back({pc.lo, pc.hi, -pc.value});
    return out;
  }
  const Grid g = make_grid(neg, cells);
  const Eigen::VectorXd v = cell_averages(neg, g);
  for (std::size_t i = 0; i < g.size(); ++i)
    if (v(static_cast<Eigen::Index>(i)) < 0.0)
      out.push_back({g.left(i), g.right(i), -v(static_cast<Eigen::Index>(i))});
  return out;
}

// Autocorrelation R(r) = int gamma(x) gamma(x + r) dx for piecewise gamma.
inline double autocorrelation(const std::vector<Piece>& g, double r) {
  double s = 0.0;
  for (const auto& p : g)
    for (const auto& q : g) {
      const double lo = std::max(p.lo, q.lo - r), hi = std::min(p.hi, q.hi - r);
      if (hi > lo) s += p.value * q.value * (hi - lo);
    }
  return s;
}

// Panels on [lo, hi] graded geometrically towards the listed singular points.
inline std::vector<std::pair<double, double>> graded_panels(double lo, double hi,
                                                            std::vector<double> breaks,
                                                            int levels = 40) {
  breaks.push_back(lo);
  breaks.push_back(hi);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  std::vector<std::pair<double, double>> panels;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i], b = breaks[i + 1];
    if (a < lo || b > hi || !(b > a)) continue;
    const double mid = 0.5 * (a + b);
    // Left half graded towards a, right half towards b.
    double x = mid;
    for (int k = 0; k < levels; ++k) {
      const double nx = a + 0.5 * (x - a);
      panels.emplace_back(nx, x);
      x = nx;
    }
    panels.emplace_back(a, x);
    x = mid;
    for (int k = 0; k < levels; ++k) {
      const double nx = b - 0.5 * (b - x);
      panels.emplace_back(x, nx);
      x = nx;
    }
    panels.emplace_back(x, b);
  }
  return panels;
}

// gamma on a uniform lattice: value v[i] on [x0 + i h, x0 + (i + 1) h).
struct LatticeGamma {
  double x0 = 0.0, h = 0.0;
  std::vector<double> v;
};

// Recognises cell-sampled profiles; small piece sets use the pairwise path.
inline std::optional<LatticeGamma> as_lattice(const std::vector<Piece>& g) {
  if (g.size() < 8) return std::nullopt;
  LatticeGamma L;
  L.h = g.front().hi - g.front().lo;
  L.x0 = g.front().lo;
  double xmax = L.x0;
  for (const auto& pc : g) {
    L.x0 = std::min(L.x0, pc.lo);
    xmax = std::max(xmax, pc.hi);
  }
  const auto n = static_cast<std::size_t>(std::lround((xmax - L.x0) / L.h));
  L.v.assign(n, 0.0);
  for (const auto& pc : g) {
    const double k = (pc.lo - L.x0) / L.h;
    const long ki = std::lround(k);
    if (std::abs(k - static_cast<double>(ki)) > 1e-9 || std::abs(pc.hi - pc.lo - L.h) > 1e-9 * L.h ||
        ki < 0 || static_cast<std::size_t>(ki) >= n)
      return std::nullopt;
    L.v[static_cast<std::size_t>(ki)] = pc.value;
  }
  return L;
}

// Lattice version of the correction.  R is exactly linear between multiples of
// h, and the primitive of p is needed only at lattice offsets plus the fixed
// node set of one reference cell.
inline double skn_correction_lattice(const LatticeGamma& L, const SknKernel& p) {
  const std::size_t n = L.v.size();
  const double h = L.h;
  double l1 = 0.0;
  for (double v : L.v) l1 += v * h;
  std::vector<double> R(n + 1, 0.0);
  for (std::size_t m = 0; m < n; ++m) {
    double s = 0.0;
    for (std::size_t i = 0; i + m < n; ++i) s += L.v[i] * L.v[i + m];
    R[m] = s * h;
  }
  double T1 = 0.0, Ip = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    const double lo = static_cast<double>(m) * h;
    auto Rr = [&](double r) { return R[m] + (R[m + 1] - R[m]) * (r - lo) / h; };
    auto panels = m == 0 ? graded_panels(0.0, h, {}, 40) : std::vector<std::pair<double, double>>{{lo, lo + h}};
    for (const auto& [a, b] : panels) {
      T1 += quad::gauss<16>([&](double r) {
        const double v = p.value(r);
        return 2.0 * Rr(r) * v * v;
      }, a, b);
      Ip += quad::gauss<16>([&](double r) { return 2.0 * Rr(r) * p.value(r); }, a, b);
    }
  }
  // Reference-cell nodes graded towards both cell ends.
  std::vector<double> t, w;
  for (const auto& [a, b] : graded_panels(0.0, 1.0, {}, 12)) {
    const double c = 0.5 * (a + b), r = 0.5 * (b - a);
    const auto& gl = quad::GaussLegendre<8>::get();
    for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
      t.push_back(c + r * gl.nodes[k]);
      w.push_back(r * gl.weights[k]);
    }
  }
  const std::size_t nk = t.size();
  // P[(d + n) * nk + k] = primitive(d h + t_k h), d = -n .. n.
  std::vector<double> P((2 * n + 1) * nk);
  for (std::size_t d = 0; d <= 2 * n; ++d)
    for (std::size_t k = 0; k < nk; ++k)
      P[d * nk + k] = p.primitive((static_cast<double>(d) - static_cast<double>(n) + t[k]) * h);
  double T3 = 0.0;
  std::vector<double> A(nk);
  for (std::size_t i = 0; i < n; ++i) {
    if (L.v[i] == 0.0) continue;
    std::fill(A.begin(), A.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (L.v[j] == 0.0) continue;
      const std::size_t d = i + n - j;  // offset (i - j) shifted by n
      for (std::size_t k = 0; k < nk; ++k) A[k] += L.v[j] * (P[d * nk + k] - P[(d - 1) * nk + k]);
    }
    double s = 0.0;
    for (std::size_t k = 0; k < nk; ++k) s += w[k] * A[k] * A[k];
    T3 += L.v[i] * h * s;
  }
  return T1 + Ip * Ip / (l1 * l1) - 2.0 * T3 / l1;
}

inline double skn_correction_quadrature(const std::vector<Piece>& g, const SknKernel& p) {
  if (auto L = as_lattice(g)) return skn_correction_lattice(*L, p);
  double l1 = 0.0, xmin = g.front().lo, xmax = g.front().hi;
  for (const auto& pc : g) {
    l1 += pc.value * (pc.hi - pc.lo);
    xmin = std::min(xmin, pc.lo);
    xmax = std::max(xmax, pc.hi);
  }
  // T1 and Ip over r in [0, xmax - xmin]; R is piecewise linear with kinks at
  // differences of piece endpoints.
  std::vector<double> rb;
  for (const auto& a : g)
    for (const auto& b : g)
      for (double u : {a.lo, a.hi})
        for (double v : {b.lo, b.hi})
          if (std::abs(u - v) > 0.0) rb.push_back(std::abs(u - v));
  double T1 = 0.0, Ip = 0.0;
  for (const auto& [a, b] : graded_panels(0.0, xmax - xmin, rb)) {
    T1 += quad::gauss<16>([&](double r) {
      const double v = p.value(r);
      return 2.0 * autocorrelation(g, r) * v * v;
    }, a, b);
    Ip += quad::gauss<16>([&](double r) { return 2.0 * autocorrelation(g, r) * p.value(r); }, a, b);
  }
  // T3 over the support of gamma, graded towards every piece endpoint.
  std::vector<double> xb;
  for (const auto& pc : g) {
    xb.push_back(pc.lo);
    xb.push_back(pc.hi);
  }
  auto A = [&](double x) {
    double s = 0.0;
    for (const auto& q : g) s += q.value * (p.primitive(x - q.lo) - p.primitive(x - q.hi));
    return s;
  };
  double T3 = 0.0;
  for (const auto& pc : g)
    for (const auto& [a, b] : graded_panels(pc.lo, pc.hi, xb, 30)) {
      T3 += pc.value * quad::gauss<16>([&](double x) {
        const double v = A(x);
        return v * v;
      }, a, b);
    }
  return T1 + Ip * Ip / (l1 * l1) - 2.0 * T3 / l1;
}

}  // namespace detail

/// 1 + the SKN correction for a general profile.  The quadrature strategy
/// reports the change when the mode count is halved as its error; the Monte
/// Carlo strategy reports the standard error of the mean.
inline SknResult skn_bound_general(const CouplingProfile& profile, const ModeBasis& basis,
                                   SknStrategy strategy = SknStrategy::Quadrature,
                                   std::uint64_t seed = 1, std::size_t samples = 1000000) {
  const auto g = detail::gamma_pieces(profile);
  double l1 = 0.0;
  for (const auto& pc : g) l1 += pc.value * (pc.hi - pc.lo);
  if (g.empty() || !(l1 > 0.0)) throw DomainError("skn bound requires ||gamma||_1 != 0");

  SknResult res;
  res.n_modes = basis.n_max();
  if (strategy == SknStrategy::Quadrature) {
    const detail::SknKernel full(basis, basis.n_max()), half(basis, basis.n_max() / 2);
    const double c = detail::skn_correction_quadrature(g, full);
    res.value = 1.0 + c;
    res.error = std::abs(c - detail::skn_correction_quadrature(g, half));
    return res;
  }

  // Monte Carlo: x_i iid with density gamma / ||gamma||_1; p is tabulated on a
  // geometric r-grid and interpolated linearly in log r.
  const detail::SknKernel p(basis, basis.n_max());
  double xmin = g.front().lo, xmax = g.front().hi;
  for (const auto& pc : g) {
    xmin = std::min(xmin, pc.lo);
    xmax = std::max(xmax, pc.hi);
  }
  const double rmax = xmax - xmin, rmin = 1e-12 * rmax;
  constexpr std::size_t n_tab = 4096;
  std::vector<double> tab(n_tab);
  const double lr0 = std::log(rmin), dlr = (std::log(rmax) - lr0) / (n_tab - 1);
  for (std::size_t i = 0; i < n_tab; ++i) tab[i] = p.value(std::exp(lr0 + dlr * static_cast<double>(i)));
  auto pv = [&](double r) {
    const double t = (std::log(std::max(std::abs(r), rmin)) - lr0) / dlr;
    const auto i = std::min<std::size_t>(static_cast<std::size_t>(std::max(t, 0.0)), n_tab - 2);
    const double f = t - static_cast<double>(i);
    return tab[i] + f * (tab[i + 1] - tab[i]);
  };
  std::vector<double> cdf;
  double acc = 0.0;
  for (const auto& pc : g) cdf.push_back(acc += pc.value * (pc.hi - pc.lo));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  auto draw = [&] {
    const double u = uni(rng) * acc;
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    const auto& pc = g[static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cdf.begin(), static_cast<std::ptrdiff_t>(g.size()) - 1))];
    return pc.lo + uni(rng) * (pc.hi - pc.lo);
  };
  double mean = 0.0, m2 = 0.0;
  for (std::size_t s = 1; s <= samples; ++s) {
    const double x1 = draw(), x2 = draw(), x3 = draw(), x4 = draw();
    const double f = pv(x1 - x2) * (pv(x1 - x2) + pv(x3 - x4) - pv(x1 - x3) - pv(x2 - x4));
    const double d = f - mean;
    mean += d / static_cast<double>(s);
    m2 += d * (f - mean);
  }
  const double var = samples > 1 ? m2 / static_cast<double>(samples - 1) : 0.0;
  res.samples = samples;
  res.value = 1.0 + l1 * l1 * mean;
  res.error = l1 * l1 * std::sqrt(var / static_cast<double>(samples));
  return res;
}

namespace detail {

// Bracketed term of the double sum in the closed form, per (kt_m, kt_n), as
// obtained by integrating the four-fold integral over the well.  With
// E_k = 1 - exp(-2ak), s = kt_m + kt_n and p = kt_m kt_n it reads
//   2/(a^3 s) - E_s/(a^4 s^2) - 2/(a^4 p) + (E_m/kt_m + E_n/kt_n)/(a^5 p)
//   - E_s/(a^5 s p) - D/(a^5 p) + E_m E_n/(2 a^6 p^2),
// where D = (E_m - E_n)/(kt_m - kt_n) has the limit 2a exp(-2ak) at kt_m = kt_n.
inline double rectwell_pair_term(double km, double kn, double a) {
  const double em = -std::expm1(-2.0 * a * km), en = -std::expm1(-2.0 * a * kn);
  const double s = km + kn, p = km * kn, es = -std::expm1(-2.0 * a * s);
  const double lo = std::min(km, kn), dk = std::abs(km - kn);
  const double D = dk == 0.0 ? 2.0 * a * std::exp(-2.0 * a * lo)
                             : std::exp(-2.0 * a * lo) * (-std::expm1(-2.0 * a * dk)) / dk;
  const double a3 = a * a * a, a4 = a3 * a, a5 = a4 * a, a6 = a5 * a;
  return 2.0 / (a3 * s) - es / (a4 * s * s) - 2.0 / (a4 * p) + (em / km + en / kn) / (a5 * p) -
         es / (a5 * s * p) - D / (a5 * p) + em * en / (2.0 * a6 * p * p);
}

inline double rectwell_single_term(double k, double a) {
  const double e = -std::expm1(-2.0 * a * k);
  const double ak = a * k;
  return -2.0 / (3.0 * ak) + 2.0 / (ak * ak) - e / (3.0 * ak * ak) - 2.0 / (ak * ak * ak) +
         e / (ak * ak * ak * ak);
}

}  // namespace detail

/// Closed-form SKN bound for the rectangular well of half-width a and depth
/// gamma = alpha0 - alpha1.  Modes beyond the basis enter through the mean
/// density (1/pi) du in each summation index.
inline double skn_bound_rectwell(double a, double gamma, const ModeBasis& basis) {
  if (!(a > 0.0) || !(gamma > 0.0)) throw DomainError("skn_bound_rectwell: need a > 0 and gamma > 0");
  const double nu1 = basis.nu1();
  const double chi1 = basis.chi1_sq();
  std::vector<double> k, w;
  for (std::size_t i = 1; i < basis.modes.size(); ++i) {
    const auto& m = basis.modes[i];
    if (m.chi0_sq == 0.0) continue;
    k.push_back(std::sqrt(m.nu - nu1));
    w.push_back(m.chi0_sq);
  }
  const double u0 = basis.tail_start_u();
  auto kt = [&](double u) { return std::sqrt(u * u - nu1); };
  constexpr double pi = std::numbers::pi;

  // Double sum: computed-by-computed, twice computed-by-tail, tail-by-tail.
  double dsum = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < k.size(); ++j)
      row += w[j] / k[j] * detail::rectwell_pair_term(k[i], k[j], a);
    const double tail = quad::semi_infinite(
        [&](double u) {
          const double q = kt(u);
          return detail::rectwell_pair_term(k[i], q, a) / q;
        },
        u0) / pi;
    dsum += w[i] / k[i] * (row + 2.0 * tail);
  }
  dsum += quad::semi_infinite(
              [&](double u) {
                const double q = kt(u);
                return quad::semi_infinite(
                           [&](double v) {
                             const double r = kt(v);
                             return detail::rectwell_pair_term(q, r, a) / (q * r);
                           },
                           u0) /
                       pi;
              },
              u0) /
          pi;

  double ssum = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) ssum += w[i] / k[i] * detail::rectwell_single_term(k[i], a);
  ssum += quad::semi_infinite(
              [&](double u) {
                const double q = kt(u);
                return detail::rectwell_single_term(q, a) / q;
              },
              u0) /
          pi;

  const double g2 = gamma * gamma, a3 = a * a * a, a4 = a3 * a;
  return 1.0 + 8.0 / 45.0 * chi1 * chi1 * g2 * a4 + 0.5 * g2 * a4 * dsum - 2.0 * chi1 * g2 * a3 * ssum;
}

struct BracketingBound {
  int upper = 1;
  int lower = 0;
  double argument = 0.0;  // (2a/pi) sqrt(nu1(alpha0) - nu1(alpha1))
};

/// Dirichlet-Neumann bracketing for the rectangular well.  The entire part is
/// taken with a relative slack of 1e-12 so that arguments which are integers
/// analytically (e.g. nu1(alpha1) = 0 exactly) are not lowered by rounding.
inline BracketingBound bracketing_bound(double a, const ModeBasis& at_alpha0,
                                        const ModeBasis& at_alpha1) {
  if (!(a > 0.0)) throw DomainError("bracketing_bound: a must be positive");
  if (!(at_alpha1.alpha0 < at_alpha0.alpha0))
    throw DomainError("bracketing_bound: requires alpha1 < alpha0");
  BracketingBound b;
  const double d = at_alpha0.nu1() - at_alpha1.nu1();
  b.argument = 2.0 * a / std::numbers::pi * std::sqrt(std::max(d, 0.0));
  b.upper = 1 + static_cast<int>(std::floor(b.argument * (1.0 + 1e-12)));
  b.lower = b.upper - 1;
  return b;
}

}  // namespace waveguide
