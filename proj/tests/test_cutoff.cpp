/// @file test_cutoff.cpp
/// @brief Unit tests for the exhaustion function, the general cut-off builder,
///        the sharp alpha=2 annulus construction, and cut-off sequences.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <cutofflab.hpp>

using namespace cutofflab;

TEST_CASE("exhaustion satisfies its own differential identity") {
  auto ex = solve_exhaustion(3, 1.0, 1.0, 1.0, 40.0);
  // For r >= 1 the Laplacian of the exhaustion equals v^2 - f exactly
  // (val = -log omega there, and omega'' + b omega' = f omega).
  const std::size_t i0 = ex.index_at_or_above(1.0);
  for (std::size_t i = i0; i < ex.r.size(); i += 97) {
    const double expect = ex.v[i] * ex.v[i] - ex.f(ex.r[i]);
    REQUIRE(ex.lap[i] == Catch::Approx(expect).margin(1e-6 * (1.0 + std::abs(expect))));
  }
}

TEST_CASE("exhaustion growth matches the comparison shape") {
  // alpha=0, kappa=0 (flat-type coefficient): u grows linearly, so u' is
  // asymptotically constant on the tail
  auto flat = solve_exhaustion(3, 0.0, 0.0, 1.0, 30.0);
  REQUIRE(flat.c5_fit > 0.0);
  {
    const double v1 = flat.v[flat.index_at_or_above(12.0)];
    const double v2 = flat.v[flat.index_at_or_above(25.0)];
    REQUIRE(v2 / v1 == Catch::Approx(1.0).margin(0.1));
  }
  // alpha=1, kappa=1: u ~ r^(1/2), so u' ~ 1/(2 sqrt(r)); check the scaled
  // derivative sqrt(r) u' is constant on the tail
  auto half = solve_exhaustion(3, 1.0, 1.0, 1.0, 40.0);
  {
    const std::size_t i1 = half.index_at_or_above(15.0);
    const std::size_t i2 = half.index_at_or_above(35.0);
    const double s1 = std::sqrt(half.r[i1]) * half.v[i1];
    const double s2 = std::sqrt(half.r[i2]) * half.v[i2];
    REQUIRE(s2 / s1 == Catch::Approx(1.0).margin(0.1));
  }
}

TEST_CASE("exhaustion decay is monotone in the coefficient constant") {
  auto e1 = solve_exhaustion(3, 1.0, 1.0, 1.0, 20.0);
  auto e2 = solve_exhaustion(3, 1.0, 1.0, 2.0, 20.0);
  // larger C forces omega to decay faster: u_2 >= u_1 on the tail
  const std::size_t i0 = e1.index_at_or_above(2.0);
  for (std::size_t i = i0; i < e1.r.size(); i += 199)
    REQUIRE(e2.neglog[i] >= e1.neglog[i]);
}

TEST_CASE("exhaustion envelopes sandwich the values") {
  for (double alpha : {0.0, 1.0, 2.0}) {
    auto ex = choose_exhaustion(3, 1.0, alpha, 30.0);
    REQUIRE(ex.D1 > 0.0);
    REQUIRE(ex.D2 >= ex.D1);
    for (std::size_t i = 1; i < ex.r.size(); i += 401) {
      const double rho = ex.rho(ex.r[i]);
      if (rho > 0.05)
        REQUIRE(ex.val[i] >= ex.D1 * rho * (1.0 - 1e-12));
      REQUIRE(ex.val[i] <= ex.D2 * std::max(1.0, rho) * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("general cut-off is certified and scales correctly") {
  auto ex = choose_exhaustion(3, 1.0, 1.0, 40.0);
  double first_c1 = 0.0, first_c2 = 0.0;
  for (double R : {1.0, 2.0, 4.0, 8.0}) {
    auto phi = build_cutoff_general(ex, R, 3.0);
    REQUIRE(phi.certified());
    REQUIRE(phi.sup_dphi > 0.0);
    if (R == 1.0) {
      first_c1 = phi.c1;
      first_c2 = phi.c2;
    } else {
      REQUIRE(phi.c1 <= 4.0 * first_c1);
      REQUIRE(phi.c1 >= first_c1 / 4.0);
      REQUIRE(phi.c2 <= 4.0 * first_c2);
      REQUIRE(phi.c2 >= first_c2 / 4.0);
    }
  }
}

TEST_CASE("general cut-off rejects out-of-domain requests") {
  auto ex = choose_exhaustion(3, 1.0, 0.0, 20.0);
  REQUIRE_THROWS(build_cutoff_general(ex, 10.0, 3.0)); // gamma R beyond domain
}

TEST_CASE("sharp alpha=2 annulus: sandwich, scale-invariant theta, tight gamma") {
  double theta_ref = -1.0;
  for (double gamma : {1.5, 1.1, 1.05}) {
    theta_ref = -1.0;
    for (double R : {1.0, 100.0}) {
      auto pr = build_cutoff_alpha2(1.0, 3, R, gamma, 4000);
      const auto& an = pr.first;
      const auto& phi = pr.second;
      REQUIRE(an.sandwich_ok);
      REQUIRE(an.min_slack >= -1e-9);
      REQUIRE(phi.certified());
      if (theta_ref < 0.0)
        theta_ref = an.theta;
      else
        REQUIRE(std::abs(an.theta - theta_ref) <= 1e-10);
    }
  }
}

TEST_CASE("sharp annulus closed-form pieces: u at both ends, v quadratic") {
  auto pr = build_cutoff_alpha2(1.0, 3, 2.0, 1.5, 4000);
  const auto& an = pr.first;
  REQUIRE(an.u(2.0) == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(an.u(3.0) == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(an.v(0.0) == 0.0);
  REQUIRE(an.v(1.0) == Catch::Approx(an.A).epsilon(1e-12));
}

TEST_CASE("cut-off sequence: doubling levels and nested supports") {
  auto ex = choose_exhaustion(3, 1.0, 0.0, 170.0);
  auto seq = build_sequence(ex, 6);
  REQUIRE(seq.profiles.size() == 6);
  for (std::size_t k = 0; k + 1 < seq.levels.size(); ++k)
    REQUIRE(seq.levels[k + 1] == 2.0 * seq.levels[k]); // exact by construction
  for (std::size_t k = 0; k + 1 < seq.profiles.size(); ++k) {
    // support of level n stays inside the plateau of level n+1
    REQUIRE(seq.support_radius[k] <= seq.plateau_radius[k + 1] * (1.0 + 1e-12));
    REQUIRE(seq.plateau_radius[k + 1] > seq.plateau_radius[k]);
  }
  REQUIRE_THROWS(build_sequence(ex, 30)); // levels exceed the exhaustion range
}
