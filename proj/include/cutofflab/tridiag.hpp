/// @file tridiag.hpp
/// @brief Thomas algorithm for tridiagonal systems.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace cutofflab {

/// Solve the tridiagonal system with sub-diagonal `a` (a[0] unused), diagonal
/// `b`, super-diagonal `c` (c[n-1] unused) and right-hand side `rhs`.
/// No pivoting; intended for diagonally dominant elliptic discretizations.
inline std::vector<double> solve_tridiag(std::vector<double> a, std::vector<double> b,
                                         std::vector<double> c, std::vector<double> rhs) {
  const std::size_t n = b.size();
  if (a.size() != n || c.size() != n || rhs.size() != n || n == 0)
    throw std::invalid_argument("solve_tridiag: inconsistent sizes");
  for (std::size_t i = 1; i < n; ++i) {
    if (b[i - 1] == 0.0)
      throw std::runtime_error("solve_tridiag: zero pivot");
    const double w = a[i] / b[i - 1];
    b[i] -= w * c[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  if (b[n - 1] == 0.0)
    throw std::runtime_error("solve_tridiag: zero pivot");
  std::vector<double> x(n);
  x[n - 1] = rhs[n - 1] / b[n - 1];
  for (std::size_t i = n - 1; i-- > 0;)
    x[i] = (rhs[i] - c[i] * x[i + 1]) / b[i];
  return x;
}

} // namespace cutofflab
