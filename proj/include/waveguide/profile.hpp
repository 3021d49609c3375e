#pragma once

// Coupling profiles alpha(x) on the barrier y = 0.  The effective perturbation
// of the comparison operator with constant coupling alpha0 is
//
//     V(x) = lambda * (alpha(x / sigma) - alpha0),
//
// stored as a bare shape (either piecewise-constant pieces or a sampled
// callable with declared support) plus the two scalings.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "waveguide/errors.hpp"
#include "waveguide/quadrature.hpp"

namespace waveguide {

/// alpha - alpha0 equal to `value` on [lo, hi).
struct Piece {
  double lo = 0.0;
  double hi = 0.0;
  double value = 0.0;
};

struct RectWell {
  double a = 1.0;       // half-width
  double alpha1 = 0.0;  // coupling inside |x| < a
};

struct PiecewiseAlpha {
  std::vector<double> breaks;  // strictly increasing, size = values.size() + 1
  std::vector<double> values;  // alpha on [breaks[i], breaks[i+1]); alpha0 elsewhere
};

struct SampledDelta {
  std::function<double(double)> delta;  // alpha(x) - alpha0, zero for |x| > support
  double support = 1.0;
};

struct Integrability {
  double l1 = 0.0;          // int |alpha - alpha0|
  double first_moment = 0.0;   // int |x| |alpha - alpha0|
  double second_moment = 0.0;  // int |x|^2 |alpha - alpha0|
  bool a1 = false, a2 = false, a2_prime = false;
};

class CouplingProfile {
 public:
  enum class Part { Full, NegativePart, MinusAbs };

  CouplingProfile(double alpha0, RectWell w) : alpha0_(alpha0) {
    if (!(w.a > 0.0)) throw DomainError("rectangular well: half-width must be positive");
    shape_ = std::vector<Piece>{{-w.a, w.a, w.alpha1 - alpha0}};
    check_finite();
  }

  CouplingProfile(double alpha0, const PiecewiseAlpha& p) : alpha0_(alpha0) {
    if (p.breaks.size() != p.values.size() + 1 || p.values.empty())
      throw DomainError("piecewise profile: need breaks.size() == values.size() + 1");
    std::vector<Piece> pieces;
    for (std::size_t i = 0; i < p.values.size(); ++i) {
      if (!(p.breaks[i + 1] > p.breaks[i]))
        throw DomainError("piecewise profile: breaks must be strictly increasing");
      pieces.push_back({p.breaks[i], p.breaks[i + 1], p.values[i] - alpha0});
    }
    shape_ = std::move(pieces);
    check_finite();
  }

  CouplingProfile(double alpha0, SampledDelta s) : alpha0_(alpha0) {
    if (!s.delta) throw DomainError("sampled profile: callable is empty");
    if (!(s.support > 0.0) || !std::isfinite(s.support))
      throw DomainError("sampled profile: support must be positive and finite");
    shape_ = std::move(s);
    check_finite();
  }

  double alpha0() const { return alpha0_; }
  double lambda() const { return lambda_; }
  double sigma() const { return sigma_; }

  CouplingProfile with_lambda(double lambda) const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be >= 0");
    CouplingProfile p = *this;
    p.lambda_ = lambda;
    return p;
  }

  CouplingProfile with_sigma(double sigma) const {
    if (!(sigma > 0.0) || !(sigma <= 1.0)) throw DomainError("sigma must lie in (0, 1]");
    CouplingProfile p = *this;
    p.sigma_ = sigma;
    return p;
  }

  /// The unscaled shape (lambda = sigma = 1) with the same part selection.
  CouplingProfile bare() const {
    CouplingProfile p = *this;
    p.lambda_ = 1.0;
    p.sigma_ = 1.0;
    return p;
  }

  /// alpha0 - gamma with gamma = max(0, -(alpha - alpha0)).
  CouplingProfile negative_part() const {
    CouplingProfile p = *this;
    p.part_ = compose(part_, Part::NegativePart);
    return p;
  }

  /// alpha - alpha0  ->  -|alpha - alpha0|.
  CouplingProfile attractive_majorant() const {
    CouplingProfile p = *this;
    p.part_ = compose(part_, Part::MinusAbs);
    return p;
  }

  /// Effective perturbation lambda * (alpha(x/sigma) - alpha0).
  double delta(double x) const {
    const double xs = x / sigma_;
    double v = 0.0;
    if (const auto* pieces = std::get_if<std::vector<Piece>>(&shape_)) {
      for (const auto& pc : *pieces)
        if (xs >= pc.lo && xs < pc.hi) {
          v = pc.value;
          break;
        }
    } else {
      const auto& s = std::get<SampledDelta>(shape_);
      v = std::abs(xs) <= s.support ? s.delta(xs) : 0.0;
    }
    return lambda_ * apply(v);
  }

  /// gamma(x) = max(0, -V(x)).
  double gamma(double x) const { return std::max(0.0, -delta(x)); }

  /// Half-width X of the window [-X, X] outside which V vanishes.
  double support() const {
    if (const auto* pieces = std::get_if<std::vector<Piece>>(&shape_)) {
      double x = 0.0;
      for (const auto& pc : *pieces) x = std::max({x, std::abs(pc.lo), std::abs(pc.hi)});
      return sigma_ * x;
    }
    return sigma_ * std::get<SampledDelta>(shape_).support;
  }

  /// Effective pieces when the profile is piecewise constant.
  std::optional<std::vector<Piece>> pieces() const {
    const auto* bare_pieces = std::get_if<std::vector<Piece>>(&shape_);
    if (!bare_pieces) return std::nullopt;
    std::vector<Piece> out;
    for (const auto& pc : *bare_pieces) {
      const double v = lambda_ * apply(pc.value);
      if (v != 0.0) out.push_back({sigma_ * pc.lo, sigma_ * pc.hi, v});
    }
    return out;
  }

  bool is_piecewise_constant() const { return std::holds_alternative<std::vector<Piece>>(shape_); }

  /// Interior points where V may jump (piece boundaries), effective coordinates.
  std::vector<double> breakpoints() const {
    std::vector<double> b;
    if (auto p = pieces())
      for (const auto& pc : *p) {
        b.push_back(pc.lo);
        b.push_back(pc.hi);
      }
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
  }

  /// Integral of g(x) * V(x) over the support, exact panel-wise for pieces.
  template <class G>
  double integrate_weighted(const G& g) const {
    if (auto p = pieces()) {
      double s = 0.0;
      for (const auto& pc : *p) s += pc.value * quad::gauss<32>(g, pc.lo, pc.hi);
      return s;
    }
    const double X = support();
    constexpr int panels = 128;
    double s = 0.0;
    for (int k = 0; k < panels; ++k) {
      const double a = -X + 2.0 * X * k / panels;
      const double b = -X + 2.0 * X * (k + 1) / panels;
      s += quad::gauss<16>([&](double x) { return g(x) * delta(x); }, a, b);
    }
    return s;
  }

  /// Integral of an arbitrary functional f(V(x), x) over the support.
  template <class F>
  double integrate_map(const F& f) const {
    if (auto p = pieces()) {
      double s = 0.0;
      for (const auto& pc : *p)
        s += quad::gauss<32>([&](double x) { return f(pc.value, x); }, pc.lo, pc.hi);
      return s;
    }
    const double X = support();
    constexpr int panels = 128;
    double s = 0.0;
    for (int k = 0; k < panels; ++k) {
      const double a = -X + 2.0 * X * k / panels;
      const double b = -X + 2.0 * X * (k + 1) / panels;
      s += quad::gauss<16>([&](double x) { return f(delta(x), x); }, a, b);
    }
    return s;
  }

  /// int V(x) dx
  double integral() const {
    if (auto p = pieces()) {
      double s = 0.0;
      for (const auto& pc : *p) s += pc.value * (pc.hi - pc.lo);
      return s;
    }
    return integrate_weighted([](double) { return 1.0; });
  }

  double l1_norm() const {
    return integrate_map([](double v, double) { return std::abs(v); });
  }

  Integrability integrability() const {
    Integrability r;
    r.l1 = l1_norm();
    r.first_moment = integrate_map([](double v, double x) { return std::abs(x) * std::abs(v); });
    r.second_moment = integrate_map([](double v, double x) { return x * x * std::abs(v); });
    const double sup = integrate_map([](double v, double) { return v * v; });
    r.a1 = std::isfinite(r.l1) && std::isfinite(sup);
    r.a2 = r.a1 && std::isfinite(r.first_moment);
    r.a2_prime = r.a2 && std::isfinite(r.second_moment);
    return r;
  }

  bool is_zero() const { return l1_norm() == 0.0; }

  /// +1 if V >= 0 everywhere, -1 if V <= 0 everywhere, 0 for mixed sign.
  int sign() const {
    bool pos = false, neg = false;
    if (auto p = pieces()) {
      for (const auto& pc : *p) (pc.value > 0.0 ? pos : neg) = true;
    } else {
      const double X = support();
      constexpr int samples = 4096;
      for (int k = 0; k < samples; ++k) {
        const double v = delta(-X + 2.0 * X * (k + 0.5) / samples);
        if (v > 0.0) pos = true;
        if (v < 0.0) neg = true;
      }
    }
    if (pos && neg) return 0;
    return neg ? -1 : 1;
  }

 private:
  static Part compose(Part outer, Part inner) {
    // MinusAbs dominates; NegativePart of MinusAbs is MinusAbs.
    if (outer == Part::MinusAbs || inner == Part::MinusAbs) return Part::MinusAbs;
    if (outer == Part::NegativePart || inner == Part::NegativePart) return Part::NegativePart;
    return Part::Full;
  }

  double apply(double v) const {
    switch (part_) {
      case Part::NegativePart: return std::min(v, 0.0);
      case Part::MinusAbs: return -std::abs(v);
      case Part::Full: break;
    }
    return v;
  }

  void check_finite() const {
    if (!std::isfinite(alpha0_)) throw DomainError("alpha0 must be finite");
    if (const auto* pieces = std::get_if<std::vector<Piece>>(&shape_))
      for (const auto& pc : *pieces)
        if (!std::isfinite(pc.value)) throw DomainError("profile values must be finite");
  }

  double alpha0_ = 0.0;
  std::variant<std::vector<Piece>, SampledDelta> shape_;
  double lambda_ = 1.0;
  double sigma_ = 1.0;
  Part part_ = Part::Full;
};

}  // namespace waveguide
