/// @file curvature.hpp
/// @brief Radial curvature lower-bound profiles G(r) and monotone cubic interpolation.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace cutofflab {

/// Fritsch-Carlson monotone cubic interpolant. Preserves monotonicity of the
/// data between knots, so nonnegative data stay nonnegative and ordered
/// tabulations stay ordered.
class MonotoneCubic {
public:
  MonotoneCubic() = default;

  MonotoneCubic(std::vector<double> x, std::vector<double> y)
      : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n)
      throw std::invalid_argument("MonotoneCubic: need >= 2 samples, matching sizes");
    for (std::size_t i = 1; i < n; ++i)
      if (!(x_[i] > x_[i - 1]))
        throw std::invalid_argument("MonotoneCubic: abscissae must be strictly increasing");

    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      h[i] = x_[i + 1] - x_[i];
      delta[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    m_.assign(n, 0.0);
    m_[0] = delta[0];
    m_[n - 1] = delta[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (delta[i - 1] * delta[i] <= 0.0) {
        m_[i] = 0.0;
      } else {
        // weighted harmonic mean keeps the interpolant monotone
        const double w1 = 2.0 * h[i] + h[i - 1];
        const double w2 = h[i] + 2.0 * h[i - 1];
        m_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
      }
    }
    // clamp endpoint slopes (Fritsch-Carlson condition)
    for (std::size_t i : {std::size_t{0}, n - 1}) {
      const double d = (i == 0) ? delta[0] : delta[n - 2];
      if (d == 0.0)
        m_[i] = 0.0;
      else if (m_[i] / d < 0.0)
        m_[i] = 0.0;
      else if (std::abs(m_[i]) > 3.0 * std::abs(d))
        m_[i] = 3.0 * d;
    }
  }

  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }

  double operator()(double x) const {
    if (x < x_.front() || x > x_.back())
      throw std::domain_error("MonotoneCubic: evaluation outside tabulated range");
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = (it == x_.begin()) ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    if (i + 1 >= x_.size())
      i = x_.size() - 2;
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    return h00 * y_[i] + h10 * h * m_[i] + h01 * y_[i + 1] + h11 * h * m_[i + 1];
  }

private:
  std::vector<double> x_, y_, m_;
};

/// Radial lower-bound profile: Ric >= -(d-1) G(r).
class CurvatureProfile {
public:
  enum class Kind { standard, constant, power_tail, tabulated };

  /// G(r) = kappa^2 / (1+r^2)^(alpha/2), defined for all r >= 0.
  static CurvatureProfile standard(double kappa, double alpha) {
    check_alpha(alpha);
    if (!(kappa >= 0.0))
      throw std::invalid_argument("CurvatureProfile: kappa must be >= 0");
    CurvatureProfile p;
    p.kind_ = Kind::standard;
    p.kappa_ = kappa;
    p.alpha_ = alpha;
    return p;
  }

  /// G(r) = kappa2 (constant), defined for all r >= 0.
  static CurvatureProfile constant(double kappa2) {
    if (!(kappa2 >= 0.0))
      throw std::invalid_argument("CurvatureProfile: kappa^2 must be >= 0");
    CurvatureProfile p;
    p.kind_ = Kind::constant;
    p.kappa_ = std::sqrt(kappa2);
    p.alpha_ = 0.0;
    return p;
  }

  /// G(s) = kappa^2 / (r0 - s)^alpha on [0, r0).
  static CurvatureProfile power_tail(double kappa, double alpha, double r0) {
    check_alpha(alpha);
    if (!(kappa >= 0.0) || !(r0 > 0.0))
      throw std::invalid_argument("CurvatureProfile: bad power-tail parameters");
    CurvatureProfile p;
    p.kind_ = Kind::power_tail;
    p.kappa_ = kappa;
    p.alpha_ = alpha;
    p.r0_ = r0;
    return p;
  }

  /// Monotone cubic interpolation through (r_i, G_i) samples, G_i >= 0.
  static CurvatureProfile tabulated(std::vector<double> r, std::vector<double> g) {
    for (double v : g)
      if (!(v >= 0.0))
        throw std::invalid_argument("CurvatureProfile: tabulated values must be >= 0");
    CurvatureProfile p;
    p.kind_ = Kind::tabulated;
    p.interp_ = MonotoneCubic(std::move(r), std::move(g));
    return p;
  }

  Kind kind() const { return kind_; }
  double kappa() const { return kappa_; }
  double alpha() const { return alpha_; }

  /// Largest r the profile is defined at (inf for standard/constant).
  double domain_max() const {
    switch (kind_) {
    case Kind::power_tail: return r0_; // open endpoint
    case Kind::tabulated: return interp_.x_max();
    default: return std::numeric_limits<double>::infinity();
    }
  }

  double operator()(double r) const {
    if (!(r >= 0.0))
      throw std::domain_error("CurvatureProfile: r must be >= 0");
    switch (kind_) {
    case Kind::standard:
      return kappa_ * kappa_ * std::pow(1.0 + r * r, -alpha_ / 2.0);
    case Kind::constant:
      return kappa_ * kappa_;
    case Kind::power_tail:
      if (!(r < r0_))
        throw std::domain_error("CurvatureProfile: power-tail profile undefined at r >= r0");
      return kappa_ * kappa_ * std::pow(r0_ - r, -alpha_);
    case Kind::tabulated:
      return std::max(0.0, interp_(r));
    }
    return 0.0;
  }

private:
  static void check_alpha(double alpha) {
    if (!(alpha >= -2.0 && alpha <= 2.0))
      throw std::invalid_argument("CurvatureProfile: alpha must lie in [-2, 2]");
  }

  Kind kind_ = Kind::constant;
  double kappa_ = 0.0;
  double alpha_ = 0.0;
  double r0_ = 0.0;
  MonotoneCubic interp_;
};

} // namespace cutofflab
