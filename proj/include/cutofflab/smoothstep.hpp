/// @file smoothstep.hpp
/// @brief C^2 quintic transition profiles with exact derivative bounds.
#pragma once

#include <cmath>
#include <stdexcept>

namespace cutofflab {

/// Quintic step on [a, b]. Rising: 0 left of a, 1 right of b; falling is the
/// mirror image. First and second derivatives vanish at both endpoints.
/// Exact bounds on [a, b]: sup|S'| = (15/8)/(b-a), sup|S''| = (10/sqrt(3))/(b-a)^2.
struct SmoothStep {
  double a;
  double b;
  bool falling; // true: 1 -> 0 across [a, b]

  SmoothStep(double a_, double b_, bool falling_) : a(a_), b(b_), falling(falling_) {
    if (!(b > a))
      throw std::invalid_argument("SmoothStep: degenerate interval");
  }

  static SmoothStep rising(double a, double b) { return SmoothStep(a, b, false); }
  static SmoothStep step_down(double a, double b) { return SmoothStep(a, b, true); }

  double width() const { return b - a; }
  double sup_d1() const { return 1.875 / width(); }
  double sup_d2() const { return (10.0 / std::sqrt(3.0)) / (width() * width()); }

  double value(double x) const {
    double v;
    if (x <= a) v = 0.0;
    else if (x >= b) v = 1.0;
    else {
      const double u = (x - a) / width();
      v = u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
    }
    return falling ? 1.0 - v : v;
  }

  double d1(double x) const {
    if (x <= a || x >= b) return 0.0;
    const double u = (x - a) / width();
    const double d = 30.0 * u * u * (1.0 - u) * (1.0 - u) / width();
    return falling ? -d : d;
  }

  double d2(double x) const {
    if (x <= a || x >= b) return 0.0;
    const double u = (x - a) / width();
    const double d = 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u) / (width() * width());
    return falling ? -d : d;
  }
};

/// sup over the transition of |q'| / sqrt(q) for the falling quintic q on [0,1].
/// Needed by the gradient-estimate bump (the bound -A1 sqrt(q) <= q' <= 0).
inline double quintic_grad_over_sqrt() {
  static const double value = [] {
    SmoothStep s = SmoothStep::step_down(0.0, 1.0);
    double best = 0.0;
    for (int i = 1; i < 200000; ++i) {
      const double x = static_cast<double>(i) / 200000.0;
      const double q = s.value(x);
      if (q > 0.0)
        best = std::max(best, std::abs(s.d1(x)) / std::sqrt(q));
    }
    return best;
  }();
  return value;
}

} // namespace cutofflab
