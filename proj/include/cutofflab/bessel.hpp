/// @file bessel.hpp
/// @brief Modified Bessel functions I_nu, K_nu (fractional order) with
///        derivatives. Temme's series for small argument, Lentz/Steed
///        continued fractions otherwise; scaled variants for large argument.
#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace cutofflab {

/// Values at (nu, x). In scaled form: i = e^{-x} I_nu(x), ip = e^{-x} I_nu'(x),
/// k = e^{x} K_nu(x), kp = e^{x} K_nu'(x).
struct BesselIK {
  double i, ip, k, kp;
};

namespace bessel_detail {

inline constexpr double euler_gamma = 0.57721566490153286060651209;

// Temme's series for K_u(x), K_{u+1}(x); |u| <= 1/2, 0 < x <= 2.
inline void temme_ik(double u, double x, double& Ku, double& Ku1) {
  const double eps = std::numeric_limits<double>::epsilon();
  const double gp = std::tgamma(1.0 + u) - 1.0;
  const double gm = std::tgamma(1.0 - u) - 1.0;
  const double a = std::log(x / 2.0);
  const double b = std::exp(u * a);
  const double sigma = -a * u;
  const double c = (std::abs(u) < eps) ? 1.0
                                       : std::sin(std::numbers::pi * u) / (u * std::numbers::pi);
  const double d = (std::abs(sigma) < eps) ? 1.0 : std::sinh(sigma) / sigma;
  double gamma1, gamma2;
  if (std::abs(u) < 1e-3) {
    // series around u = 0; c3, c2 are the z^3, z^2 coefficients of 1/Gamma(1+z)
    const double c3 = -0.04200263503409523553;
    const double c2 = -0.65587807152025388108;
    gamma1 = -euler_gamma - c3 * u * u;
    gamma2 = 1.0 + c2 * u * u;
  } else {
    gamma1 = (0.5 / u) * (gp - gm) * c;
    gamma2 = (2.0 + gp + gm) * c / 2.0;
  }

  double p = (gp + 1.0) / (2.0 * b);
  double q = (1.0 + gm) * b / 2.0;
  double f = (std::cosh(sigma) * gamma1 + d * (-a) * gamma2) / c;
  double h = p;
  double coef = 1.0;
  double sum = coef * f;
  double sum1 = coef * h;
  for (int k = 1; k < 500; ++k) {
    f = (k * f + p + q) / (k * k - u * u);
    p /= (k - u);
    q /= (k + u);
    h = p - k * f;
    coef *= x * x / (4.0 * k);
    sum += coef * f;
    sum1 += coef * h;
    if (std::abs(coef * f) < std::abs(sum) * eps)
      break;
  }
  Ku = sum;
  Ku1 = 2.0 * sum1 / x;
}

// CF1 (modified Lentz): fv = I_{v+1}(x) / I_v(x).
inline double cf1_ik(double v, double x) {
  const double tol = 2.0 * std::numeric_limits<double>::epsilon();
  const double tiny = std::sqrt(std::numeric_limits<double>::min());
  double C = tiny, f = tiny, D = 0.0;
  for (int k = 1; k < 200000; ++k) {
    const double bk = 2.0 * (v + k) / x;
    C = bk + 1.0 / C;
    D = bk + D;
    if (C == 0.0) C = tiny;
    if (D == 0.0) D = tiny;
    D = 1.0 / D;
    const double delta = C * D;
    f *= delta;
    if (std::abs(delta - 1.0) <= tol)
      return f;
  }
  throw std::runtime_error("bessel: CF1 failed to converge");
}

// CF2 (Steed/Thompson-Barnett): scaled K, i.e. e^{x} K_v(x), e^{x} K_{v+1}(x).
// Requires x > 1.
inline void cf2_ik_scaled(double v, double x, double& Kv, double& Kv1) {
  const double tol = std::numeric_limits<double>::epsilon();
  double a = v * v - 0.25;
  double b = 2.0 * (x + 1.0);
  double D = 1.0 / b;
  double f = D, delta = D;
  double prev = 0.0, current = 1.0;
  double Q = -a, C = -a;
  double S = 1.0 + Q * delta;
  for (int k = 2; k < 200000; ++k) {
    a -= 2.0 * (k - 1);
    b += 2.0;
    D = 1.0 / (b + a * D);
    delta *= b * D - 1.0;
    f += delta;
    double q = (prev - (b - 2.0) * current) / a;
    prev = current;
    current = q;
    C *= -a / k;
    Q += C * q;
    S += Q * delta;
    if (q < tol) { // renormalize to avoid under/overflow
      C *= q;
      prev /= q;
      current /= q;
      q = 1.0;
    }
    if (std::abs(Q * delta) < std::abs(S) * tol) {
      Kv = std::sqrt(std::numbers::pi / (2.0 * x)) / S;
      Kv1 = Kv * (0.5 + v + x + (v * v - 0.25) * f) / x;
      return;
    }
  }
  throw std::runtime_error("bessel: CF2 failed to converge");
}

} // namespace bessel_detail

/// Scaled pair (e^{-x} I_nu, e^{x} K_nu) with derivatives, nu in (0, 3), x > 0.
inline BesselIK bessel_ik_scaled(double nu, double x) {
  if (!(nu > 0.0 && nu < 3.0))
    throw std::invalid_argument("bessel_ik: order must lie in (0, 3)");
  if (!(x > 0.0))
    throw std::domain_error("bessel_ik: argument must be > 0");

  const int n = static_cast<int>(std::lround(nu));
  const double u = nu - n; // |u| <= 1/2

  double Ku, Ku1; // scaled: e^{x} K
  if (x <= 2.0) {
    bessel_detail::temme_ik(u, x, Ku, Ku1);
    const double ex = std::exp(x);
    Ku *= ex;
    Ku1 *= ex;
  } else {
    bessel_detail::cf2_ik_scaled(u, x, Ku, Ku1);
  }
  // forward recurrence in the order: K_{w+1} = (2w/x) K_w + K_{w-1}
  double prev = Ku, current = Ku1;
  for (int k = 1; k <= n; ++k) {
    const double next = 2.0 * (u + k) / x * current + prev;
    prev = current;
    current = next;
  }
  const double Kv = prev;  // e^{x} K_nu
  const double Kv1 = current; // e^{x} K_{nu+1}

  const double fv = bessel_detail::cf1_ik(nu, x); // I_{nu+1}/I_nu
  // Wronskian I K' - I' K = -1/x  =>  I_nu = 1/(x (K_nu fv + K_{nu+1}))
  const double Iv = 1.0 / (x * (Kv * fv + Kv1)); // e^{-x} I_nu

  BesselIK out;
  out.i = Iv;
  out.ip = Iv * (fv + nu / x);     // I' = I_{nu+1} + (nu/x) I_nu
  out.k = Kv;
  out.kp = -Kv1 + (nu / x) * Kv;   // K' = -K_{nu+1} + (nu/x) K_nu
  return out;
}

/// Unscaled values; guarded against overflow of e^{x}.
inline BesselIK bessel_ik(double nu, double x) {
  if (x > 690.0)
    throw std::overflow_error("bessel_ik: use bessel_ik_scaled for x > 690");
  BesselIK b = bessel_ik_scaled(nu, x);
  const double ex = std::exp(x);
  b.i *= ex;
  b.ip *= ex;
  b.k /= ex;
  b.kp /= ex;
  return b;
}

} // namespace cutofflab
