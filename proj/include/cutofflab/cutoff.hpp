/// @file cutoff.hpp
/// @brief Cut-off families: smooth steps in the exhaustion function (general
///        alpha), the sharp annulus construction for alpha = 2 (any gamma > 1),
///        and nested cut-off sequences with certified decay rates.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "exhaustion.hpp"
#include "model.hpp"
#include "smoothstep.hpp"
#include "tridiag.hpp"

namespace cutofflab {

struct CutoffProfile {
  double R = 1.0;
  double gamma = 2.0;
  double alpha = 0.0;
  std::vector<double> r, phi, dphi, lap_phi;
  double sup_dphi = 0.0;
  double sup_lap = 0.0;
  bool range_ok = false;   // 0 <= phi <= 1
  bool plateau_ok = false; // phi == 1 on [0, R]
  bool support_ok = false; // phi == 0 on [gamma R, infinity)
  double c1 = 0.0;         // sup|phi'|  * R
  double c2 = 0.0;         // sup|lap phi| * R^(1+alpha/2)
  double gamma_threshold = 0.0; // D2/D1 of the exhaustion used (general form)

  bool certified() const { return range_ok && plateau_ok && support_ok; }
};

namespace detail {

inline void certify(CutoffProfile& p) {
  p.range_ok = true;
  p.plateau_ok = true;
  p.support_ok = true;
  p.sup_dphi = 0.0;
  p.sup_lap = 0.0;
  for (std::size_t i = 0; i < p.r.size(); ++i) {
    if (p.phi[i] < -1e-12 || p.phi[i] > 1.0 + 1e-12)
      p.range_ok = false;
    if (p.r[i] <= p.R && std::abs(p.phi[i] - 1.0) > 1e-12)
      p.plateau_ok = false;
    if (p.r[i] >= p.gamma * p.R && std::abs(p.phi[i]) > 1e-12)
      p.support_ok = false;
    p.sup_dphi = std::max(p.sup_dphi, std::abs(p.dphi[i]));
    p.sup_lap = std::max(p.sup_lap, std::abs(p.lap_phi[i]));
  }
  p.c1 = p.sup_dphi * p.R;
  p.c2 = p.sup_lap * std::pow(p.R, 1.0 + p.alpha / 2.0);
}

} // namespace detail

/// Cut-off phi = S(exhaustion / (D1 rho(R))) with a falling quintic step whose
/// edges are read off the profile itself: lower edge at max_{r<=R} of the
/// scaled exhaustion, upper edge at its value at gamma R. Plateau [0,R] and
/// support in [0, gamma R] then hold by monotonicity.
inline CutoffProfile build_cutoff_general(const ExhaustionProfile& exh, double R, double gamma) {
  if (!(R >= 1.0))
    throw std::invalid_argument("build_cutoff_general: R must be >= 1");
  if (!(gamma > 1.0))
    throw std::invalid_argument("build_cutoff_general: gamma must be > 1");
  if (gamma * R > exh.domain)
    throw std::invalid_argument("build_cutoff_general: gamma*R beyond exhaustion domain");

  CutoffProfile p;
  p.R = R;
  p.gamma = gamma;
  p.alpha = exh.alpha;
  p.gamma_threshold = exh.D2 / exh.D1;

  const double scale = exh.D1 * exh.rho(R);
  double lo = 0.0;
  for (std::size_t i = 0; i < exh.r.size() && exh.r[i] <= R; ++i)
    lo = std::max(lo, exh.val[i]);
  lo /= scale;
  // last node at or below gamma R
  std::size_t hi_idx = exh.index_at_or_above(gamma * R);
  if (exh.r[hi_idx] > gamma * R && hi_idx > 0)
    --hi_idx;
  const double hi = exh.val[hi_idx] / scale;
  if (!(hi > lo * (1.0 + 1e-9)))
    throw std::runtime_error(
        "build_cutoff_general: support/plateau unsatisfiable (step edges degenerate; "
        "exhaustion D2/D1 = " + std::to_string(p.gamma_threshold) + ", gamma = " +
        std::to_string(gamma) + ")");

  const SmoothStep S = SmoothStep::step_down(lo, hi);
  for (std::size_t i = 0; i <= hi_idx; ++i) {
    const double u = exh.val[i] / scale;
    p.r.push_back(exh.r[i]);
    p.phi.push_back(S.value(u));
    const double du = exh.grad[i] / scale;
    p.dphi.push_back(S.d1(u) * du);
    p.lap_phi.push_back(S.d2(u) * du * du + S.d1(u) * exh.lap[i] / scale);
  }
  // clamp the step boundary node to exactly zero and pad one node past support
  p.phi[hi_idx] = 0.0;
  p.dphi[hi_idx] = 0.0;
  p.lap_phi[hi_idx] = 0.0;
  if (hi_idx + 1 < exh.r.size()) {
    p.r.push_back(exh.r[hi_idx + 1]);
    p.phi.push_back(0.0);
    p.dphi.push_back(0.0);
    p.lap_phi.push_back(0.0);
  }
  detail::certify(p);
  return p;
}

// ---------------------------------------------------------------------------
// Sharp alpha = 2 construction (works for every gamma > 1)
// ---------------------------------------------------------------------------

struct AnnulusSolution {
  double R = 1.0, gamma = 2.0;
  double a = 0.0;      // (d-1)(1 + sqrt(1+4 kappa^2))/2
  double C2 = 0.0;     // coefficient of the explicit subsolution u
  double A = 0.0;      // v(s) = A s^2
  double theta = 0.0;  // bisection solution of h(theta) = h(0)/2
  double h0_display = 0.0; // 1/(8 gamma^(a+1) (a+1))
  double h0_prose = 0.0;   // (gamma-1)^2/(2 gamma^(a+1) (2 gamma-1)^2 (a+1))
  std::vector<double> r, omega, domega; // annulus samples
  bool sandwich_ok = false;
  double min_slack = 0.0; // min over nodes of both sandwich gaps
  bool uprime_negative = false;

  double u(double rr) const {
    return C2 * (std::pow(rr, 1.0 - a) - std::pow(R, 1.0 - a)) + 1.0 +
           (rr * rr - R * R) / (2.0 * std::pow(gamma, a + 1.0) * R * R * (a + 1.0));
  }
  double du(double rr) const {
    return C2 * (1.0 - a) * std::pow(rr, -a) +
           rr / (std::pow(gamma, a + 1.0) * R * R * (a + 1.0));
  }
  double v(double s) const { return A * s * s; }
  double upper(double rr) const { // barrier 1 - v((r-R)/(2(gamma-1)))
    return 1.0 - v((rr - R) / (2.0 * (gamma - 1.0)));
  }
  double h_of(double th) const { // R-dependent evaluation; R-free by the theory
    return u((1.0 + th) * R) - 1.0 + v((gamma - 1.0 - th) * R / (2.0 * (gamma - 1.0)));
  }
};

/// Explicit constants and the Dirichlet annulus solve for alpha = 2:
/// Delta omega = 1/(gamma^(a+1) R^2), omega(R)=1, omega(gamma R)=0 on the
/// standard alpha=2 model with parameter kappa (kappa=0: flat).
inline AnnulusSolution solve_annulus_alpha2(double kappa, int d, double R, double gamma,
                                            std::size_t grid_n = 4000) {
  if (!(R > 0.0) || !(gamma > 1.0))
    throw std::invalid_argument("solve_annulus_alpha2: need R > 0, gamma > 1");
  AnnulusSolution an;
  an.R = R;
  an.gamma = gamma;
  an.a = (d - 1) * (1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa)) / 2.0;
  const double a = an.a;
  const double ga1 = std::pow(gamma, a + 1.0);
  an.C2 = (1.0 + (gamma * gamma - 1.0) / (2.0 * (a + 1.0) * ga1)) /
          ((1.0 - std::pow(gamma, 1.0 - a)) * std::pow(R, 1.0 - a));
  an.A = 1.0 / (2.0 * (a + 1.0) * ga1 * R * R);
  an.h0_display = 1.0 / (8.0 * ga1 * (a + 1.0));
  an.h0_prose = (gamma - 1.0) * (gamma - 1.0) /
                (2.0 * ga1 * (2.0 * gamma - 1.0) * (2.0 * gamma - 1.0) * (a + 1.0));

  // theta: bisection of h(theta) = h(0)/2 on (0, (gamma-1)/2); h is decreasing
  {
    const double target = an.h_of(0.0) / 2.0;
    double lo = 0.0, hi = (gamma - 1.0) / 2.0;
    if (!(an.h_of(hi) < target && an.h_of(lo) > target))
      throw std::runtime_error("solve_annulus_alpha2: theta root not bracketed; h(0) = " +
                               std::to_string(an.h_of(0.0)) + ", h((gamma-1)/2) = " +
                               std::to_string(an.h_of(hi)));
    for (int it = 0; it < 200; ++it) {
      const double mid = (lo + hi) / 2.0;
      (an.h_of(mid) > target ? lo : hi) = mid;
    }
    an.theta = (lo + hi) / 2.0;
  }

  // uniform annulus grid and the FD Dirichlet solve
  const std::size_t N = grid_n;
  const double dr = (gamma - 1.0) * R / static_cast<double>(N);
  an.r.resize(N + 1);
  for (std::size_t i = 0; i <= N; ++i)
    an.r[i] = R + dr * static_cast<double>(i);
  an.r.back() = gamma * R;

  // b = (d-1) h'/h on the annulus from the warping solution
  const auto prof = CurvatureProfile::standard(kappa, 2.0);
  RadialGrid wg;
  wg.nodes.push_back(0.0);
  for (double rr : an.r)
    wg.nodes.push_back(rr);
  const auto warp = solve_warping(prof, wg, 1e-11);
  std::vector<double> b(N + 1);
  for (std::size_t i = 0; i <= N; ++i)
    b[i] = (d - 1) * warp.hp[i + 1] / warp.h[i + 1];

  const double rhs_c = 1.0 / (ga1 * R * R);
  std::vector<double> sub(N - 1), diag(N - 1), sup(N - 1), rhs(N - 1);
  for (std::size_t i = 1; i < N; ++i) {
    const double bi = b[i];
    sub[i - 1] = 1.0 / (dr * dr) - bi / (2.0 * dr);
    diag[i - 1] = -2.0 / (dr * dr);
    sup[i - 1] = 1.0 / (dr * dr) + bi / (2.0 * dr);
    rhs[i - 1] = rhs_c;
  }
  rhs[0] -= sub[0] * 1.0;      // omega(R) = 1
  rhs[N - 2] -= sup[N - 2] * 0.0; // omega(gamma R) = 0
  const auto inner = solve_tridiag(sub, diag, sup, rhs);
  an.omega.assign(N + 1, 0.0);
  an.omega[0] = 1.0;
  for (std::size_t i = 1; i < N; ++i)
    an.omega[i] = inner[i - 1];
  an.omega[N] = 0.0;

  an.domega.assign(N + 1, 0.0);
  for (std::size_t i = 1; i < N; ++i)
    an.domega[i] = (an.omega[i + 1] - an.omega[i - 1]) / (2.0 * dr);
  an.domega[0] = (-3.0 * an.omega[0] + 4.0 * an.omega[1] - an.omega[2]) / (2.0 * dr);
  an.domega[N] = (3.0 * an.omega[N] - 4.0 * an.omega[N - 1] + an.omega[N - 2]) / (2.0 * dr);

  // sandwich u <= omega <= 1 - v((r-R)/(2(gamma-1))) and sign of u'
  an.sandwich_ok = true;
  an.min_slack = 1e300;
  an.uprime_negative = true;
  for (std::size_t i = 0; i <= N; ++i) {
    const double lo_gap = an.omega[i] - an.u(an.r[i]);
    const double hi_gap = an.upper(an.r[i]) - an.omega[i];
    an.min_slack = std::min({an.min_slack, lo_gap, hi_gap});
    if (lo_gap < -1e-9 || hi_gap < -1e-9)
      an.sandwich_ok = false;
    if (!(an.du(an.r[i]) < 0.0))
      an.uprime_negative = false;
  }
  return an;
}

/// Sharp alpha = 2 cut-off: a rising quintic step in omega between the levels
/// 1 - v((gamma-1-theta)R/(2(gamma-1))) (zero edge) and u((1+theta)R) (one edge).
inline CutoffProfile cutoff_from_annulus(const AnnulusSolution& an, double kappa, int d) {
  CutoffProfile p;
  p.R = an.R;
  p.gamma = an.gamma;
  p.alpha = 2.0;

  const double l0 = 1.0 - an.v((an.gamma - 1.0 - an.theta) * an.R / (2.0 * (an.gamma - 1.0)));
  const double l1 = an.u((1.0 + an.theta) * an.R);
  if (!(l1 > l0))
    throw std::runtime_error("cutoff_from_annulus: step levels inverted (h(theta) <= 0)");
  const SmoothStep S(l0, l1, false); // rising in omega

  const double rhs_c = 1.0 / (std::pow(an.gamma, an.a + 1.0) * an.R * an.R);
  // prefix inside the ball: phi = 1
  const std::size_t n_pre = 64;
  for (std::size_t i = 0; i < n_pre; ++i) {
    p.r.push_back(an.R * static_cast<double>(i) / static_cast<double>(n_pre));
    p.phi.push_back(1.0);
    p.dphi.push_back(0.0);
    p.lap_phi.push_back(0.0);
  }
  for (std::size_t i = 0; i < an.r.size(); ++i) {
    const double w = an.omega[i];
    p.r.push_back(an.r[i]);
    p.phi.push_back(S.value(w));
    p.dphi.push_back(S.d1(w) * an.domega[i]);
    p.lap_phi.push_back(S.d2(w) * an.domega[i] * an.domega[i] + S.d1(w) * rhs_c);
  }
  // one node past the support
  p.r.push_back(an.gamma * an.R * 1.01);
  p.phi.push_back(0.0);
  p.dphi.push_back(0.0);
  p.lap_phi.push_back(0.0);
  detail::certify(p);
  (void)kappa;
  (void)d;
  return p;
}

inline std::pair<AnnulusSolution, CutoffProfile> build_cutoff_alpha2(double kappa, int d,
                                                                     double R, double gamma,
                                                                     std::size_t grid_n = 4000) {
  AnnulusSolution an = solve_annulus_alpha2(kappa, d, R, gamma, grid_n);
  CutoffProfile p = cutoff_from_annulus(an, kappa, d);
  return {std::move(an), std::move(p)};
}

// ---------------------------------------------------------------------------
// Nested sequence of cut-offs (levels doubling in the exhaustion)
// ---------------------------------------------------------------------------

struct CutoffSequence {
  std::vector<CutoffProfile> profiles; // p_n: == 1 on {exh < c_n}, == 0 outside {exh < c_{n+1}}
  std::vector<double> levels;          // c_1, ..., c_{n_max+1}
  std::vector<double> plateau_radius;  // first r with exh >= c_n
  std::vector<double> support_radius;  // first r with exh >= c_{n+1}
};

/// Levels c_{n+1} = 2 c_n exactly, falling quintic steps in the exhaustion.
inline CutoffSequence build_sequence(const ExhaustionProfile& exh, std::size_t n_max,
                                     double c1 = 0.0) {
  CutoffSequence seq;
  if (c1 <= 0.0)
    c1 = 1.25 * exh.D2; // plateau of the first profile contains B_1
  const double top = exh.neglog.back();
  if (c1 * std::pow(2.0, static_cast<double>(n_max)) >= top)
    throw std::invalid_argument("build_sequence: insufficient domain to host n_max levels");
  for (std::size_t nlev = 0; nlev <= n_max; ++nlev)
    seq.levels.push_back(c1 * std::pow(2.0, static_cast<double>(nlev)));

  for (std::size_t nidx = 0; nidx + 1 <= n_max; ++nidx) {
    const double cn = seq.levels[nidx], cn1 = seq.levels[nidx + 1];
    const SmoothStep S = SmoothStep::step_down(cn, cn1);
    CutoffProfile p;
    p.alpha = exh.alpha;
    p.gamma_threshold = exh.D2 / exh.D1;
    std::size_t last = exh.r.size() - 1;
    for (std::size_t i = 0; i < exh.r.size(); ++i) {
      const double u = exh.val[i];
      p.r.push_back(exh.r[i]);
      p.phi.push_back(S.value(u));
      p.dphi.push_back(S.d1(u) * exh.grad[i]);
      p.lap_phi.push_back(S.d2(u) * exh.grad[i] * exh.grad[i] + S.d1(u) * exh.lap[i]);
      if (u >= cn1 && exh.r[i] > 1.0) {
        last = i;
        break;
      }
    }
    // report radii; R / gamma fields carry the measured plateau/support radii
    double rp = exh.r.back(), rs = exh.r.back();
    for (std::size_t i = exh.idx_half; i < exh.r.size(); ++i) {
      if (exh.val[i] >= cn && exh.r[i] > 1.0) { rp = exh.r[i]; break; }
    }
    for (std::size_t i = exh.idx_half; i < exh.r.size(); ++i) {
      if (exh.val[i] >= cn1 && exh.r[i] > 1.0) { rs = exh.r[i]; break; }
    }
    seq.plateau_radius.push_back(rp);
    seq.support_radius.push_back(rs);
    p.R = rp;
    p.gamma = rs / rp;
    (void)last;
    detail::certify(p);
    seq.profiles.push_back(std::move(p));
  }
  return seq;
}

} // namespace cutofflab
