/// @file test_comparison.cpp
/// @brief Unit tests for the closed-form comparison solutions, the Sturm
///        ordering report, and the volume lower-bound chain.
#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <vector>

#include <cutofflab.hpp>

using namespace cutofflab;

namespace {

// direct integration of psi'' = kappa^2 (r-s)^(-alpha) psi, psi(0)=0, psi'(0)=1
std::array<double, 2> integrate_reference(double kappa, double alpha, double r, double s_to) {
  auto f = [&](double s, const std::array<double, 2>& y, std::array<double, 2>& dy) {
    dy[0] = y[1];
    dy[1] = kappa * kappa * std::pow(r - s, -alpha) * y[0];
  };
  std::array<double, 2> y{0.0, 1.0};
  integrate_adaptive<2>(f, y, 0.0, s_to, 1e-12, 1e-300);
  return y;
}

} // namespace

TEST_CASE("closed forms satisfy the initial conditions and the ODE residual") {
  for (double alpha : {-1.5, -1.0, 0.0, 0.5, 1.0, 1.5, 2.0}) {
    auto cf = closed_form_psi(1.0, alpha, 6.0);
    const double eps = 1e-5;
    REQUIRE(std::abs(cf.psi(0.0)) <= 1e-8);
    REQUIRE(cf.dpsi(0.0) == Catch::Approx(1.0).margin(1e-8));
    if (cf.is_exact()) {
      // |psi'' - G psi| <= 1e-6 (1 + |psi''|) by central differences
      for (double s : {0.5, 2.0, 4.0, 5.0}) {
        const double dd = (cf.psi(s + eps) - 2.0 * cf.psi(s) + cf.psi(s - eps)) / (eps * eps);
        REQUIRE(std::abs(dd - cf.coefficient(s) * cf.psi(s)) <= 1e-4 * (1.0 + std::abs(dd)));
      }
    }
  }
}

TEST_CASE("zero curvature collapses every branch to psi(s) = s") {
  for (double alpha : {-1.0, 0.5, 2.0}) {
    auto cf = closed_form_psi(0.0, alpha, 5.0);
    for (double s : {0.1, 2.5, 4.9})
      REQUIRE(cf.psi(s) == Catch::Approx(s).margin(1e-14));
  }
}

TEST_CASE("alpha=0 Bessel form reduces to sinh(kappa s)/kappa") {
  for (double kappa : {0.5, 1.0, 2.0}) {
    auto cf = closed_form_psi(kappa, 0.0, 6.0);
    for (int i = 1; i <= 20; ++i) {
      const double s = 6.0 * i / 21.0;
      REQUIRE(cf.psi(s) == Catch::Approx(std::sinh(kappa * s) / kappa).epsilon(1e-10));
      REQUIRE(cf.dpsi(s) == Catch::Approx(std::cosh(kappa * s)).epsilon(1e-10));
    }
  }
}

TEST_CASE("power solution (alpha=2) matches direct integration to 1e-8") {
  for (double kappa : {0.5, 1.0, 2.0}) {
    auto cf = closed_form_psi(kappa, 2.0, 5.0);
    for (int i = 1; i <= 30; ++i) {
      const double s = 0.9 * 5.0 * i / 30.0;
      const auto ref = integrate_reference(kappa, 2.0, 5.0, s);
      REQUIRE(cf.psi(s) == Catch::Approx(ref[0]).epsilon(1e-8));
    }
  }
}

TEST_CASE("power solution log-derivative tends to 1 at the origin") {
  auto cf = closed_form_psi(1.0, 2.0, 5.0);
  const double s = 1e-7;
  REQUIRE(s * cf.dpsi(s) / cf.psi(s) == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("Bessel branch matches direct integration to 1e-6") {
  for (double alpha : {0.5, 1.0, 1.5}) {
    auto cf = closed_form_psi(1.0, alpha, 4.0);
    for (int i = 1; i <= 30; ++i) {
      const double s = 0.9 * 4.0 * i / 30.0;
      const auto ref = integrate_reference(1.0, alpha, 4.0, s);
      REQUIRE(cf.psi(s) == Catch::Approx(ref[0]).epsilon(1e-6));
      REQUIRE(cf.dpsi(s) == Catch::Approx(ref[1]).epsilon(1e-6));
    }
  }
}

TEST_CASE("hyperbolic barrier dominates the true solution for alpha < 0") {
  for (double alpha : {-2.0, -1.0, -0.5}) {
    for (double kappa : {0.5, 1.0, 2.0}) {
      const double r = 5.0;
      auto cf = closed_form_psi(kappa, alpha, r);
      REQUIRE_FALSE(cf.is_exact());
      for (int i = 1; i <= 100; ++i) {
        const double s = 0.999 * r * i / 100.0;
        const auto ref = integrate_reference(kappa, alpha, r, s);
        REQUIRE(cf.psi(s) >= ref[0]);
      }
    }
  }
}

TEST_CASE("alpha=2 endpoint bound psi(r-1) <= r^(1+delta)/delta") {
  for (double r : {2.0, 10.0, 100.0}) {
    for (double kappa : {0.5, 1.0, 2.0}) {
      auto cf = closed_form_psi(kappa, 2.0, r);
      REQUIRE(cf.psi(r - 1.0) <= cf.endpoint_bound_alpha2());
    }
  }
}

TEST_CASE("Sturm report: classical comparison r <= sinh r") {
  std::vector<double> s, lo, dlo, hi, dhi;
  for (int i = 0; i <= 200; ++i) {
    const double x = 5.0 * i / 200.0;
    s.push_back(x);
    lo.push_back(x);
    dlo.push_back(1.0);
    hi.push_back(std::sinh(x));
    dhi.push_back(std::cosh(x));
  }
  auto rep = sturm_compare(s, lo, dlo, hi, dhi);
  REQUIRE(rep.value_ordered);
  REQUIRE(rep.logderiv_ordered);
}

TEST_CASE("Sturm report: identical inputs are ordered within tolerance") {
  std::vector<double> s, v, dv;
  for (int i = 0; i <= 50; ++i) {
    const double x = 3.0 * i / 50.0;
    s.push_back(x);
    v.push_back(std::sinh(x));
    dv.push_back(std::cosh(x));
  }
  auto rep = sturm_compare(s, v, dv, v, dv);
  REQUIRE(rep.value_ordered);
  REQUIRE(rep.logderiv_ordered);
}

TEST_CASE("Sturm report flags a genuine violation with its first node") {
  std::vector<double> s{0.0, 1.0, 2.0, 3.0}, one{0.0, 1.0, 2.0, 3.0}, d1{1, 1, 1, 1};
  std::vector<double> other{0.0, 1.0, 1.5, 3.0}, d2{1, 1, 1, 1}; // dips below at node 2
  auto rep = sturm_compare(s, one, d1, other, d2);
  REQUIRE_FALSE(rep.value_ordered);
  REQUIRE(rep.first_violation == 2);
}

TEST_CASE("warping against standard profile obeys Sturm ordering vs power tail") {
  // G_standard(1,2) <= kappa^2/s^2; compare h (standard) against s^((1+sqrt5)/2)
  auto G = CurvatureProfile::standard(1.0, 2.0);
  auto grid = RadialGrid::uniform(10.0, 1000);
  auto w = solve_warping(G, grid, 1e-11);
  const double p = (1.0 + std::sqrt(5.0)) / 2.0;
  // ordering integrated from r = 1: h(r) <= h(1) r^p for r >= 1
  const double h1 = w.at(1.0)[0];
  for (std::size_t i = 1; i < grid.nodes.size(); i += 37) {
    const double r = grid.nodes[i];
    if (r < 1.0)
      continue;
    REQUIRE(w.h[i] <= h1 * std::pow(r, p) * (1.0 + 1e-9));
  }
}

TEST_CASE("volume lower-bound chain holds over the mandated sweeps") {
  std::vector<double> rx{2.0, 4.0, 8.0, 16.0};

  auto a2 = chain_sweep(1.0, 2.0, 3, rx);
  REQUIRE(a2.bound_ok);
  REQUIRE(a2.fitted_exponent <= (1.0 + 2.0 * (1.0 + std::sqrt(5.0)) / 2.0) * 1.05);

  auto a1 = chain_sweep(1.0, 1.0, 3, rx);
  REQUIRE(a1.bound_ok);
  REQUIRE(a1.fitted_exponent == Catch::Approx(0.5).margin(0.1));

  auto am = chain_sweep(1.0, -1.0, 3, rx);
  REQUIRE(am.bound_ok);
  REQUIRE(am.fitted_exponent == Catch::Approx(1.5).margin(0.1));
}

TEST_CASE("volume lower-bound chain is trivial for kappa = 0") {
  auto rep = volume_lowerbound_chain(0.0, 1.0, 3, 4.0);
  REQUIRE(rep.h_le_psi);
  REQUIRE(rep.integral == Catch::Approx(std::pow(4.0, 3) / 3.0).epsilon(1e-6));
}
