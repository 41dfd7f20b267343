/// @file test_liyau.cpp
/// @brief Unit tests for the annulus Poisson solves and the gradient-estimate
///        bound assembly.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <cutofflab.hpp>

using namespace cutofflab;

TEST_CASE("linear annulus solver: harmonic function in flat 3-space") {
  // omega'' + (2/r) omega' = 0, omega(R)=1, omega(gR)=0:
  // omega(r) = (1/r - 1/(gR)) / (1/R - 1/(gR))
  const double R = 2.0, gR = 6.0;
  auto b = [](double r) { return 2.0 / r; };
  std::vector<double> r, w;
  solve_linear_annulus(b, [](double) { return 0.0; }, [](double) { return 0.0; }, R, gR, 1.0,
                       0.0, 4000, r, w);
  for (std::size_t i = 0; i < r.size(); i += 311) {
    const double exact = (1.0 / r[i] - 1.0 / gR) / (1.0 / R - 1.0 / gR);
    REQUIRE(w[i] == Catch::Approx(exact).margin(1e-7));
  }
}

TEST_CASE("linear annulus solver: constant right-hand side") {
  // omega'' + (2/r) omega' = 1 has particular solution r^2/6.
  const double R = 1.0, gR = 3.0;
  auto b = [](double r) { return 2.0 / r; };
  std::vector<double> r, w;
  solve_linear_annulus(b, [](double) { return 0.0; }, [](double) { return 1.0; }, R, gR,
                       R * R / 6.0, gR * gR / 6.0, 4000, r, w);
  for (std::size_t i = 0; i < r.size(); i += 311)
    REQUIRE(w[i] == Catch::Approx(r[i] * r[i] / 6.0).margin(1e-7));
}

TEST_CASE("bump constant grows as t shrinks and B responds monotonically") {
  REQUIRE(bump_constant(0.5) < bump_constant(0.25));
  REQUIRE(bump_constant(0.25) < bump_constant(0.1));
  const double sup1 = bump_constant(1.0);
  REQUIRE(sup1 >= 10.0 / std::sqrt(3.0) - 1e-12); // width-1 second-derivative floor
  // tighter collars can only increase the certified bound B
  auto r1 = liyau_case_i(1.0, 1.0, 3, 4.0, 2.0, 0.4);
  auto r2 = liyau_case_i(1.0, 1.0, 3, 4.0, 2.0, 0.1);
  REQUIRE(r1.ok);
  REQUIRE(r2.ok);
  REQUIRE(r2.B > r1.B);
}

TEST_CASE("gradient estimate case (i): bound certified across alpha and R1") {
  for (double alpha : {0.0, 1.0, 2.0}) {
    double smin = 1e300, smax = 0.0;
    for (double R1 : {2.0, 4.0, 8.0, 16.0}) {
      auto rep = liyau_case_i(alpha, 1.0, 3, R1);
      REQUIRE(rep.ok);
      REQUIRE(rep.margin_min > 0.0);
      REQUIRE(rep.B >= rep.Omega1);
      const double scaled = rep.sup_lhs * std::pow(R1, alpha);
      smin = std::min(smin, scaled);
      smax = std::max(smax, scaled);
    }
    REQUIRE(smax / smin < 4.0);
  }
}

TEST_CASE("gradient estimate case (ii): positive floor and certified bound") {
  auto rep = liyau_case_ii(1.0, 1.0, 3, 4.0);
  REQUIRE(rep.ok);
  REQUIRE(rep.margin_min > 0.0);
}

TEST_CASE("lambda selection stays on the search grid") {
  auto rep = liyau_case_i(1.0, 1.0, 3, 4.0);
  REQUIRE(rep.lambda >= 0.05);
  REQUIRE(rep.lambda <= 0.951);
}
