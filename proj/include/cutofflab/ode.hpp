/// @file ode.hpp
/// @brief Adaptive Dormand-Prince 5(4) integrator for small first-order systems.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace cutofflab {

/// One Dormand-Prince 5(4) step. Returns the 5th-order solution in `out` and
/// the embedded error estimate in `err`. `f(t, y, dydt)` evaluates the RHS.
template <std::size_t N, typename F>
void dp5_step(const F& f, double t, const std::array<double, N>& y, double h,
              std::array<double, N>& out, std::array<double, N>& err) {
  using V = std::array<double, N>;
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // 4th-order weights (for the error estimate)
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  V k1, k2, k3, k4, k5, k6, k7, tmp;
  f(t, y, k1);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
  f(t + c2 * h, tmp, k2);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
  f(t + c3 * h, tmp, k3);
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
  f(t + c4 * h, tmp, k4);
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
  f(t + c5 * h, tmp, k5);
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
  f(t + h, tmp, k6);
  for (std::size_t i = 0; i < N; ++i)
    out[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
  f(t + h, out, k7);
  for (std::size_t i = 0; i < N; ++i)
    err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
}

/// Integrate y' = f(t, y) from t0 to t1 with adaptive step control.
/// Error is controlled per component against atol + rtol * |y|.
template <std::size_t N, typename F>
void integrate_adaptive(const F& f, std::array<double, N>& y, double t0, double t1,
                        double rtol = 1e-10, double atol = 1e-14) {
  if (t1 == t0) return;
  if (t1 < t0) throw std::invalid_argument("integrate_adaptive: t1 < t0");
  double t = t0;
  double h = (t1 - t0) / 16.0;
  const double hmin = (t1 - t0) * 1e-14;
  std::array<double, N> out, err;
  int rejects_in_a_row = 0;
  while (t < t1) {
    h = std::min(h, t1 - t);
    dp5_step<N>(f, t, y, h, out, err);
    double enorm = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(out[i]));
      enorm = std::max(enorm, std::abs(err[i]) / sc);
    }
    if (enorm <= 1.0) {
      t += h;
      y = out;
      rejects_in_a_row = 0;
      const double fac = std::clamp(0.9 * std::pow(std::max(enorm, 1e-12), -0.2), 0.2, 5.0);
      h *= fac;
    } else {
      h *= std::clamp(0.9 * std::pow(enorm, -0.2), 0.1, 0.9);
      if (++rejects_in_a_row > 200 || h < hmin)
        throw std::runtime_error("integrate_adaptive: step size underflow");
    }
  }
}

/// Fixed-step driver: n equal DP5 steps on [t0, t1] (for convergence studies).
template <std::size_t N, typename F>
void integrate_fixed(const F& f, std::array<double, N>& y, double t0, double t1,
                     std::size_t n) {
  const double h = (t1 - t0) / static_cast<double>(n);
  std::array<double, N> out, err;
  double t = t0;
  for (std::size_t k = 0; k < n; ++k) {
    dp5_step<N>(f, t, y, h, out, err);
    y = out;
    t = t0 + h * static_cast<double>(k + 1);
  }
}

} // namespace cutofflab
