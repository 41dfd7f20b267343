/// @file test_diffusion.cpp
/// @brief Unit tests for the radial finite-volume diffusion solver and the
///        mass-inequality harness (conservation, contraction, extinction).
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <cutofflab.hpp>

using namespace cutofflab;

namespace {

std::vector<double> gaussian_bump(const DiffusionProblem& p, double amp, double width) {
  std::vector<double> u(p.cells());
  for (std::size_t i = 0; i < u.size(); ++i)
    u[i] = amp * std::exp(-(p.centers[i] * p.centers[i]) / (width * width));
  return u;
}

} // namespace

TEST_CASE("odd power is odd and matches pow on positives") {
  REQUIRE(odd_power(2.0, 3.0) == Catch::Approx(8.0));
  REQUIRE(odd_power(-2.0, 3.0) == Catch::Approx(-8.0));
  REQUIRE(odd_power(-4.0, 0.5) == Catch::Approx(-2.0));
  REQUIRE(odd_power(0.0, 0.4) == 0.0);
}

TEST_CASE("finite-volume geometry matches exact flat areas and volumes") {
  auto p = make_diffusion_problem(3, 2.0, CurvatureProfile::constant(0.0), 10.0, 100);
  double vtot = 0.0;
  for (std::size_t i = 0; i < p.cells(); ++i)
    vtot += p.vol[i];
  REQUIRE(vtot == Catch::Approx(4.0 / 3.0 * std::numbers::pi * 1000.0).epsilon(1e-10));
  for (std::size_t i = 1; i <= p.cells(); i += 13)
    REQUIRE(p.area[i] ==
            Catch::Approx(4.0 * std::numbers::pi * p.faces[i] * p.faces[i]).epsilon(1e-10));
}

TEST_CASE("constant data is an exact fixed point under zero flux") {
  auto p = make_diffusion_problem(3, 2.0, CurvatureProfile::constant(0.0), 5.0, 64);
  std::vector<double> u0(p.cells(), 0.7);
  auto run = run_diffusion(p, u0, 0.1, 1.0);
  for (double x : run.final_state.u)
    REQUIRE(x == Catch::Approx(0.7).margin(1e-10));
}

TEST_CASE("linear heat flow conserves mass to Newton tolerance") {
  auto p = make_diffusion_problem(3, 1.0, CurvatureProfile::constant(0.0), 12.0, 120);
  auto u0 = gaussian_bump(p, 1.0, 1.5);
  auto run = run_diffusion(p, u0, 0.05, 1.0);
  const double m0 = run.series.front().mass;
  for (const auto& s : run.series)
    REQUIRE(std::abs(s.mass - m0) <= 1e-9 * m0);
}

TEST_CASE("linear heat flow scales linearly in the data") {
  auto p = make_diffusion_problem(3, 1.0, CurvatureProfile::constant(0.0), 10.0, 100);
  auto u0 = gaussian_bump(p, 1.0, 1.5);
  auto v0 = u0;
  for (double& x : v0)
    x *= 2.0;
  auto ru = run_diffusion(p, u0, 0.05, 0.5);
  auto rv = run_diffusion(p, v0, 0.05, 0.5);
  for (std::size_t i = 0; i < p.cells(); ++i)
    REQUIRE(rv.final_state.u[i] ==
            Catch::Approx(2.0 * ru.final_state.u[i]).margin(1e-9));
}

TEST_CASE("slow diffusion m=2: conservation ledger and finite propagation") {
  auto p = make_diffusion_problem(3, 2.0, CurvatureProfile::constant(0.0), 14.0, 140);
  // compactly supported cap, so the free-boundary motion is visible
  std::vector<double> u0(p.cells(), 0.0);
  for (std::size_t i = 0; i < p.cells(); ++i)
    u0[i] = std::max(1.0 - (p.centers[i] * p.centers[i]) / 4.0, 0.0);
  auto led = check_mass_conservation(p, u0, 0.02, 1.5);
  REQUIRE(led.ok);
  REQUIRE(led.support_interior);
  REQUIRE(led.max_drift <= 1e-8);
  // compactly supported-to-numerical-floor data keeps a finite growing front
  REQUIRE(led.support.back() > led.support.front());
  REQUIRE(led.support.back() < p.faces.back() * 0.8);
}

TEST_CASE("slow diffusion on a negatively curved model still conserves mass") {
  auto G = CurvatureProfile::standard(1.0, 2.0);
  auto p = make_diffusion_problem(3, 1.5, G, 14.0, 140);
  auto u0 = gaussian_bump(p, 1.0, 1.0);
  auto led = check_mass_conservation(p, u0, 0.02, 1.0);
  REQUIRE(led.ok);
}

TEST_CASE("L1 contraction: identical data, ordered data, random data") {
  auto p2 = make_diffusion_problem(3, 2.0, CurvatureProfile::constant(0.0), 12.0, 96);
  auto u0 = gaussian_bump(p2, 1.0, 1.2);

  // identical inputs: distance is identically zero
  auto same = check_l1_contraction(p2, u0, u0, 0.05, 0.5);
  REQUIRE(same.nonincreasing);
  for (double d : same.distances)
    REQUIRE(d == 0.0);

  // ordered inputs under zero flux: distance equals the conserved mass gap
  auto v0 = gaussian_bump(p2, 0.5, 1.2);
  auto ord = check_l1_contraction(p2, u0, v0, 0.05, 0.5);
  REQUIRE(ord.nonincreasing);
  for (double d : ord.distances)
    REQUIRE(d == Catch::Approx(ord.distances.front()).epsilon(1e-7));

  // random bumps, slow and fast regimes
  std::mt19937 rng(971u);
  std::uniform_real_distribution<double> amp(0.2, 1.5), wid(0.8, 2.5);
  for (double m : {2.0, 0.6}) {
    auto p = make_diffusion_problem(3, m, CurvatureProfile::constant(0.0), 12.0, 96);
    for (int trial = 0; trial < 3; ++trial) {
      auto a = gaussian_bump(p, amp(rng), wid(rng));
      auto b = gaussian_bump(p, amp(rng), wid(rng));
      auto rep = check_l1_contraction(p, a, b, 0.05, 0.5);
      REQUIRE(rep.nonincreasing);
    }
  }
}

TEST_CASE("weak conservation inequality for fast diffusion") {
  auto ex = choose_exhaustion(3, 0.0, 0.0, 24.0);
  auto p = make_diffusion_problem(3, 0.6, CurvatureProfile::constant(0.0), 24.0, 160);
  auto u0 = gaussian_bump(p, 1.0, 1.5);
  auto run = run_diffusion(p, u0, 0.05, 1.0, 5);

  auto phi = build_cutoff_general(ex, 2.0, 3.0);
  // v = 0 is a solution, so g = u is an admissible ordered difference
  auto rep = weak_conservation_inequality(p, run.snapshots.front(), run.snapshots.back(),
                                          run.series.front().t, run.series.back().t, phi);
  REQUIRE(rep.ok);
  REQUIRE(rep.M > 0.0);
  REQUIRE(rep.b >= 2);

  // collapsed times: the inequality reduces to inner-ball <= outer-ball mass
  auto same = weak_conservation_inequality(p, run.snapshots.front(), run.snapshots.front(),
                                           0.25, 0.25, phi);
  REQUIRE(same.margin >= 0.0);
}

TEST_CASE("critical fast-diffusion exponent closed form") {
  REQUIRE(critical_exponent(3, 0.0) == Catch::Approx(1.0 / 3.0).epsilon(1e-14));
  REQUIRE(critical_exponent(3, 1.0) > critical_exponent(3, 0.0));
  REQUIRE(critical_exponent(5, 0.0) > critical_exponent(3, 0.0));
}

TEST_CASE("extinction below the critical exponent respects the lower bound") {
  auto ex = choose_exhaustion(3, 0.0, 0.0, 24.0);
  std::vector<CutoffProfile> cutoffs;
  for (double R : {2.0, 4.0, 6.0})
    cutoffs.push_back(build_cutoff_general(ex, R, 3.0));

  auto p = make_diffusion_problem(3, 0.2, CurvatureProfile::constant(0.0), 20.0, 160,
                                  DiffusionProblem::Boundary::absorbing);
  auto u0 = gaussian_bump(p, 1.0, 2.0);
  auto rep = extinction_study(3, 0.0, 0.2, p, u0, 0.02, 6.0, cutoffs);
  REQUIRE(rep.m < rep.m_c);
  REQUIRE(rep.extinct);
  REQUIRE(rep.ok);
  REQUIRE(rep.t_extinct >= rep.lower_bound);
  REQUIRE(rep.lower_bound > 0.0);
}

TEST_CASE("above the critical exponent the mass persists over the same horizon") {
  auto ex = choose_exhaustion(3, 0.0, 0.0, 24.0);
  std::vector<CutoffProfile> cutoffs{build_cutoff_general(ex, 2.0, 3.0)};
  auto p = make_diffusion_problem(3, 0.8, CurvatureProfile::constant(0.0), 20.0, 160,
                                  DiffusionProblem::Boundary::absorbing);
  auto u0 = gaussian_bump(p, 1.0, 2.0);
  auto rep = extinction_study(3, 0.0, 0.8, p, u0, 0.05, 1.0, cutoffs);
  REQUIRE(rep.m > rep.m_c);
  REQUIRE(rep.censored);
  REQUIRE(rep.ok);
  REQUIRE(rep.mass_final > 0.9 * rep.mass0);
}
