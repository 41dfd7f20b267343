/// @file model.hpp
/// @brief Warping ODE h'' = G h of rotationally symmetric models, volumes,
///        Laplacian comparison and volume-ratio monotonicity checks.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "curvature.hpp"
#include "grid.hpp"
#include "ode.hpp"

namespace cutofflab {

/// Surface measure of the unit (d-1)-sphere: 2 pi^(d/2) / Gamma(d/2).
inline double sphere_area_constant(int d) {
  if (d < 2)
    throw std::invalid_argument("sphere_area_constant: d must be >= 2");
  return 2.0 * std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0);
}

/// Samples of the warping function h and h' on a radial grid, together with
/// the profile that generated them (so values between nodes can be recovered
/// by re-integration).
struct WarpingSolution {
  RadialGrid grid;
  std::vector<double> h;
  std::vector<double> hp;
  CurvatureProfile profile;
  double rtol = 1e-10;

  /// h, h' at an arbitrary r <= r_max, by integrating from the nearest grid
  /// node below r.
  std::array<double, 2> at(double r) const {
    if (r < 0.0 || r > grid.r_max() * (1.0 + 1e-12))
      throw std::domain_error("WarpingSolution::at: r outside grid");
    auto it = std::upper_bound(grid.nodes.begin(), grid.nodes.end(), r);
    std::size_t i = (it == grid.nodes.begin()) ? 0 : static_cast<std::size_t>(it - grid.nodes.begin()) - 1;
    std::array<double, 2> y{h[i], hp[i]};
    const double r0 = grid.nodes[i];
    if (r > r0) {
      const auto& G = profile;
      auto f = [&G](double t, const std::array<double, 2>& y_, std::array<double, 2>& dy) {
        dy[0] = y_[1];
        dy[1] = G(t) * y_[0];
      };
      integrate_adaptive<2>(f, y, r0, r, rtol, 1e-14);
    }
    return y;
  }
};

struct ModelManifold {
  int d = 3;
  WarpingSolution warp;
};

namespace detail {
// Two-term series start h(s) = s + G(0) s^3/6 + O(s^5), h'(s) = 1 + G(0) s^2/2.
inline std::array<double, 2> series_launch(const CurvatureProfile& G, double s) {
  const double g0 = G(0.0);
  return {s + g0 * s * s * s / 6.0, 1.0 + g0 * s * s / 2.0};
}
} // namespace detail

/// Integrate h'' = G h, h(0)=0, h'(0)=1 over the grid (adaptive DP5(4), series
/// launch on the first sliver to avoid the degenerate origin).
inline WarpingSolution solve_warping(const CurvatureProfile& profile, const RadialGrid& grid,
                                     double rtol = 1e-10) {
  grid.validate();
  if (grid.r_max() > profile.domain_max())
    throw std::invalid_argument("solve_warping: profile domain shorter than grid");
  WarpingSolution w{grid, {}, {}, profile, rtol};
  const std::size_t n = grid.size();
  w.h.resize(n);
  w.hp.resize(n);
  w.h[0] = 0.0;
  w.hp[0] = 1.0;

  auto f = [&profile](double t, const std::array<double, 2>& y, std::array<double, 2>& dy) {
    dy[0] = y[1];
    dy[1] = profile(t) * y[0];
  };

  const double delta = std::min(grid.nodes[1], 1e-3);
  std::array<double, 2> y = detail::series_launch(profile, delta);
  double t = delta;
  for (std::size_t i = 1; i < n; ++i) {
    integrate_adaptive<2>(f, y, t, grid.nodes[i], rtol, 1e-14);
    t = grid.nodes[i];
    w.h[i] = y[0];
    w.hp[i] = y[1];
  }
  return w;
}

/// Fixed-step variant: one DP5 step per cell (first cell: series launch to
/// r_1/64 then 8 equal substeps). For observed-order studies.
inline WarpingSolution solve_warping_fixed(const CurvatureProfile& profile,
                                           const RadialGrid& grid) {
  grid.validate();
  WarpingSolution w{grid, {}, {}, profile, 0.0};
  const std::size_t n = grid.size();
  w.h.resize(n);
  w.hp.resize(n);
  w.h[0] = 0.0;
  w.hp[0] = 1.0;
  auto f = [&profile](double t, const std::array<double, 2>& y, std::array<double, 2>& dy) {
    dy[0] = y[1];
    dy[1] = profile(t) * y[0];
  };
  const double delta = grid.nodes[1] / 64.0;
  std::array<double, 2> y = detail::series_launch(profile, delta);
  integrate_fixed<2>(f, y, delta, grid.nodes[1], 8);
  w.h[1] = y[0];
  w.hp[1] = y[1];
  for (std::size_t i = 2; i < n; ++i) {
    integrate_fixed<2>(f, y, grid.nodes[i - 1], grid.nodes[i], 1);
    w.h[i] = y[0];
    w.hp[i] = y[1];
  }
  return w;
}

/// V_G(R) = C(d) * int_0^R h^(d-1): joint high-accuracy integration of
/// (h, h', V) so the volume inherits the integrator's tolerance.
inline double volume_ball(const CurvatureProfile& profile, int d, double R,
                          double rtol = 1e-12) {
  if (!(R > 0.0))
    throw std::invalid_argument("volume_ball: R must be > 0");
  if (R > profile.domain_max())
    throw std::invalid_argument("volume_ball: R beyond profile domain");
  const double cd = sphere_area_constant(d);
  auto f = [&profile, d, cd](double t, const std::array<double, 3>& y, std::array<double, 3>& dy) {
    dy[0] = y[1];
    dy[1] = profile(t) * y[0];
    dy[2] = cd * std::pow(y[0], d - 1);
  };
  const double delta = std::min(R / 64.0, 1e-3);
  auto hs = detail::series_launch(profile, delta);
  // V(delta) ~ C(d) delta^d / d for the flat leading term
  std::array<double, 3> y{hs[0], hs[1], cd * std::pow(delta, static_cast<double>(d)) / d};
  integrate_adaptive<3>(f, y, delta, R, rtol, 1e-300);
  return y[2];
}

struct VolumeTable {
  std::vector<double> radii;
  std::vector<double> volumes;
  double cd = 0.0;
};

/// Volumes at several radii in one integration pass.
inline VolumeTable volume_table(const CurvatureProfile& profile, int d,
                                std::vector<double> radii, double rtol = 1e-12) {
  std::sort(radii.begin(), radii.end());
  if (radii.empty() || !(radii.front() > 0.0))
    throw std::invalid_argument("volume_table: radii must be positive");
  VolumeTable tab;
  tab.cd = sphere_area_constant(d);
  auto f = [&profile, d, &tab](double t, const std::array<double, 3>& y, std::array<double, 3>& dy) {
    dy[0] = y[1];
    dy[1] = profile(t) * y[0];
    dy[2] = tab.cd * std::pow(y[0], d - 1);
  };
  const double delta = std::min(radii.front() / 64.0, 1e-3);
  auto hs = detail::series_launch(profile, delta);
  std::array<double, 3> y{hs[0], hs[1], tab.cd * std::pow(delta, static_cast<double>(d)) / d};
  double t = delta;
  for (double R : radii) {
    integrate_adaptive<3>(f, y, t, R, rtol, 1e-300);
    t = R;
    tab.radii.push_back(R);
    tab.volumes.push_back(y[2]);
  }
  return tab;
}

/// Upper bound on the Laplacian of the distance function: (d-1) h'(r)/h(r).
inline double laplacian_comparison(const WarpingSolution& w, int d, double r) {
  if (!(r > 0.0))
    throw std::domain_error("laplacian_comparison: singular at r = 0");
  const auto y = w.at(r);
  return (d - 1) * y[1] / y[0];
}

struct RatioReport {
  std::vector<double> radii;
  std::vector<double> ratios; // V_low(R) / V_high(R)
  bool nonincreasing = false;
  bool profiles_ordered = false;
  double max_increase = 0.0; // largest upward step between consecutive radii
};

/// Check R -> V_low(R)/V_high(R) is nonincreasing for G_low <= G_high.
inline RatioReport bishop_gromov_ratio_check(const CurvatureProfile& low,
                                             const CurvatureProfile& high, int d,
                                             const std::vector<double>& radii,
                                             double tol = 1e-9) {
  RatioReport rep;
  rep.radii = radii;
  std::sort(rep.radii.begin(), rep.radii.end());
  // precondition: ordering of the profiles, sampled densely
  rep.profiles_ordered = true;
  const double rmax = rep.radii.back();
  for (int i = 0; i <= 1000; ++i) {
    const double r = rmax * i / 1000.0;
    if (low(r) > high(r) * (1.0 + 1e-12) + 1e-14) {
      rep.profiles_ordered = false;
      break;
    }
  }
  const auto vl = volume_table(low, d, rep.radii);
  const auto vh = volume_table(high, d, rep.radii);
  rep.ratios.resize(rep.radii.size());
  for (std::size_t i = 0; i < rep.radii.size(); ++i)
    rep.ratios[i] = vl.volumes[i] / vh.volumes[i];
  rep.nonincreasing = true;
  for (std::size_t i = 1; i < rep.ratios.size(); ++i) {
    const double up = rep.ratios[i] - rep.ratios[i - 1];
    rep.max_increase = std::max(rep.max_increase, up);
    if (up > tol * std::max(1.0, rep.ratios[i - 1]))
      rep.nonincreasing = false;
  }
  return rep;
}

} // namespace cutofflab
