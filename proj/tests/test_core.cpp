/// @file test_core.cpp
/// @brief Unit tests for grids, the ODE driver, tridiagonal solves, quintic
///        steps, Bessel functions, and the model-manifold geometry.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include <cutofflab.hpp>

using namespace cutofflab;

namespace {
double flat_ball_volume(int d, double R) {
  return std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0) * std::pow(R, d);
}
} // namespace

TEST_CASE("radial grids validate and refine") {
  auto g = RadialGrid::uniform(10.0, 100);
  REQUIRE(g.nodes.size() == 101);
  REQUIRE(g.nodes.front() == 0.0);
  REQUIRE(g.nodes.back() == Catch::Approx(10.0));
  REQUIRE_NOTHROW(g.validate());

  auto gg = RadialGrid::graded(10.0, 64, 2.0);
  REQUIRE_NOTHROW(gg.validate());
  REQUIRE(gg.nodes[1] < g.nodes[1]);
}

TEST_CASE("adaptive integrator hits tight tolerances on sinh") {
  auto f = [](double, const std::array<double, 2>& y, std::array<double, 2>& dy) {
    dy[0] = y[1];
    dy[1] = y[0];
  };
  std::array<double, 2> y{0.0, 1.0};
  integrate_adaptive<2>(f, y, 0.0, 10.0, 1e-12, 1e-300);
  REQUIRE(y[0] == Catch::Approx(std::sinh(10.0)).epsilon(1e-10));
  REQUIRE(y[1] == Catch::Approx(std::cosh(10.0)).epsilon(1e-10));
}

TEST_CASE("tridiagonal solver reproduces a known system") {
  // -u'' = 1 on (0,1), u(0)=u(1)=0, second-order FD: u(x)=x(1-x)/2
  const std::size_t n = 199;
  const double h = 1.0 / (n + 1);
  std::vector<double> a(n, -1.0), b(n, 2.0), c(n, -1.0), rhs(n, h * h);
  auto u = solve_tridiag(a, b, c, rhs);
  for (std::size_t i = 0; i < n; i += 20) {
    const double x = (i + 1) * h;
    REQUIRE(u[i] == Catch::Approx(0.5 * x * (1.0 - x)).margin(1e-12));
  }
}

TEST_CASE("quintic step endpoint and sup-norm facts") {
  SmoothStep s(2.0, 3.0, /*falling=*/false);
  REQUIRE(s.value(2.0) == 0.0);
  REQUIRE(s.value(3.0) == 1.0);
  REQUIRE(s.d1(2.0) == 0.0);
  REQUIRE(s.d1(3.0) == 0.0);
  REQUIRE(s.d2(2.0) == 0.0);
  REQUIRE(s.d2(3.0) == 0.0);
  REQUIRE(s.sup_d1() == Catch::Approx(1.875)); // 15/8 over unit width
  REQUIRE(s.sup_d2() == Catch::Approx(10.0 / std::sqrt(3.0)));
  // measured sup matches the closed form
  double m1 = 0.0, m2 = 0.0;
  for (int i = 0; i <= 4000; ++i) {
    const double x = 2.0 + i / 4000.0;
    m1 = std::max(m1, std::abs(s.d1(x)));
    m2 = std::max(m2, std::abs(s.d2(x)));
  }
  REQUIRE(m1 == Catch::Approx(s.sup_d1()).epsilon(1e-6));
  REQUIRE(m2 == Catch::Approx(s.sup_d2()).epsilon(1e-6));
}

TEST_CASE("modified Bessel functions: half-integer closed forms and Wronskian") {
  auto v = bessel_ik(0.5, 1.0);
  REQUIRE(v.i == Catch::Approx(std::sqrt(2.0 / std::numbers::pi) * std::sinh(1.0)).epsilon(1e-12));
  REQUIRE(v.k == Catch::Approx(std::sqrt(std::numbers::pi / 2.0) * std::exp(-1.0)).epsilon(1e-12));

  for (double nu : {0.25, 0.5, 1.0 / (2.0 - 1.0), 1.5, 2.0}) {
    for (double z : {0.05, 0.7, 2.0, 9.0, 40.0, 300.0}) {
      auto w = bessel_ik_scaled(nu, z);
      // scaled Wronskian: i*kp - ip*k = -1/z
      REQUIRE(w.i * w.kp - w.ip * w.k == Catch::Approx(-1.0 / z).epsilon(1e-9));
    }
  }
}

TEST_CASE("Bessel I_nu cross-check against a 40-term ascending series") {
  // nu = 1/(2-alpha) with alpha = 1, z = 2
  const double nu = 1.0, z = 2.0;
  long double sum = 0.0L, zh = z / 2.0L;
  for (int k = 0; k < 40; ++k) {
    long double term = powl(zh, nu + 2.0L * k) / (tgammal(k + 1.0L) * tgammal(nu + k + 1.0L));
    sum += term;
  }
  auto v = bessel_ik(nu, z);
  REQUIRE(v.i == Catch::Approx(static_cast<double>(sum)).epsilon(1e-12));
}

TEST_CASE("flat warping is exact: h = r and Euclidean ball volumes") {
  auto flat = CurvatureProfile::constant(0.0);
  auto grid = RadialGrid::uniform(10.0, 200);
  auto w = solve_warping(flat, grid, 1e-12);
  for (std::size_t i = 0; i < grid.nodes.size(); i += 25) {
    REQUIRE(w.h[i] == Catch::Approx(grid.nodes[i]).margin(1e-10));
    REQUIRE(w.hp[i] == Catch::Approx(1.0).margin(1e-10));
  }
  for (int d : {2, 3, 4}) {
    for (double R : {0.5, 1.0, 2.0, 7.0}) {
      REQUIRE(volume_ball(flat, d, R) ==
              Catch::Approx(flat_ball_volume(d, R)).epsilon(1e-10));
    }
  }
}

TEST_CASE("constant curvature -1 warping is sinh") {
  auto hyp = CurvatureProfile::constant(1.0);
  auto grid = RadialGrid::uniform(10.0, 400);
  auto w = solve_warping(hyp, grid, 1e-12);
  for (std::size_t i = 0; i < grid.nodes.size(); i += 40)
    REQUIRE(w.h[i] == Catch::Approx(std::sinh(grid.nodes[i])).margin(1e-8));
  // d=2 volume of the hyperbolic disc: 2 pi (cosh R - 1)
  REQUIRE(volume_ball(hyp, 2, 1.0) ==
          Catch::Approx(2.0 * std::numbers::pi * (std::cosh(1.0) - 1.0)).epsilon(1e-10));
}

TEST_CASE("warping solution interpolates between nodes") {
  auto hyp = CurvatureProfile::constant(1.0);
  auto grid = RadialGrid::uniform(5.0, 100);
  auto w = solve_warping(hyp, grid, 1e-12);
  auto hv = w.at(2.345);
  REQUIRE(hv[0] == Catch::Approx(std::sinh(2.345)).epsilon(1e-8));
  REQUIRE(hv[1] == Catch::Approx(std::cosh(2.345)).epsilon(1e-8));
}

TEST_CASE("Laplacian comparison bound for the standard profile") {
  // kappa=1, alpha=2, d=3: Delta r <= (d-1) h'/h <= (d-1) (1+sqrt5)/2 / r for r >= 1,
  // by Sturm ordering against the power solution of G = kappa^2/r^2 >= G_standard.
  auto G = CurvatureProfile::standard(1.0, 2.0);
  auto grid = RadialGrid::uniform(20.0, 2000);
  auto w = solve_warping(G, grid, 1e-11);
  const double c = (1.0 + std::sqrt(5.0)) / 2.0;
  for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
    const double r = grid.nodes[i];
    if (r < 1.0)
      continue;
    REQUIRE(laplacian_comparison(w, 3, r) <= 2.0 * c / r * (1.0 + 1e-9));
  }
}

TEST_CASE("Bishop-Gromov volume ratios for ordered profiles") {
  std::mt19937 rng(20240817u);
  std::uniform_real_distribution<double> ukap(0.2, 1.5), ualp(0.0, 2.0);
  std::vector<double> radii;
  for (int i = 1; i <= 24; ++i)
    radii.push_back(0.5 * i);
  for (int trial = 0; trial < 5; ++trial) {
    const double k = ukap(rng);
    const double a1 = ualp(rng), a2 = ualp(rng);
    // standard(k, max(a1,a2)) <= standard(k, min(a1,a2)) pointwise
    auto low = CurvatureProfile::standard(k, std::max(a1, a2));
    auto high = CurvatureProfile::standard(k, std::min(a1, a2));
    auto rep = bishop_gromov_ratio_check(low, high, 3, radii);
    REQUIRE(rep.profiles_ordered);
    REQUIRE(rep.nonincreasing);
  }
}

TEST_CASE("fixed-step warping converges at order >= 4") {
  auto G = CurvatureProfile::constant(1.0);
  std::vector<double> errs;
  for (std::size_t n : {40, 80, 160}) {
    auto g = RadialGrid::uniform(5.0, n);
    auto w = solve_warping_fixed(G, g);
    errs.push_back(std::abs(w.h.back() - std::sinh(5.0)));
  }
  REQUIRE(std::log2(errs[0] / errs[1]) >= 4.0);
  REQUIRE(std::log2(errs[1] / errs[2]) >= 4.0);
}

TEST_CASE("tabulated curvature profile round-trips through interpolation") {
  std::vector<double> r, g;
  for (int i = 0; i <= 200; ++i) {
    r.push_back(0.05 * i);
    g.push_back(1.0 / (1.0 + r.back() * r.back()));
  }
  auto tab = CurvatureProfile::tabulated(r, g);
  auto ref = CurvatureProfile::standard(1.0, 2.0);
  for (double x : {0.123, 1.7, 4.44, 9.9})
    REQUIRE(tab(x) == Catch::Approx(ref(x)).margin(1e-4)); // interpolation of 0.05-spaced samples
}
