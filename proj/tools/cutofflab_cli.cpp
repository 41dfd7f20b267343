/// @file cutofflab_cli.cpp
/// @brief Command-line laboratory: geometry tables, cut-off profiles, the
///        gradient-estimate verifier, diffusion runs, and a verify-all
///        battery with Markdown/JSON/CSV reports.
///
/// Exit codes: 0 success, 1 verification failure, 2 invalid configuration.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <cutofflab.hpp>
#include <cutofflab/report.hpp>

using namespace cutofflab;
using nlohmann::json;

namespace {

struct Options {
  double alpha = 0.0;
  double kappa = 1.0;
  int d = 3;
  double gamma = 3.0;
  double R = 2.0;
  double m = 2.0;
  std::size_t grid_n = 160;
  double dt = 0.02;
  double horizon = 1.0;
  std::string out;
  unsigned seed = 1u;
  double tol_margin = 0.0; // extra slack required of every reported margin
};

std::string output_dir(const Options& opt) {
  if (!opt.out.empty())
    return opt.out;
  if (const char* env = std::getenv("CUTOFFLAB_OUT"))
    return env;
  return ".";
}

json config_json(const std::string& cmd, const Options& o) {
  return json{{"command", cmd}, {"alpha", o.alpha},   {"kappa", o.kappa},
              {"d", o.d},       {"gamma", o.gamma},   {"R", o.R},
              {"m", o.m},       {"grid_n", o.grid_n}, {"dt", o.dt},
              {"horizon", o.horizon}, {"seed", o.seed}, {"tol_margin", o.tol_margin}};
}

/// Write the deterministic report plus a manifest carrying the timestamp in a
/// separate file, so identical configs produce byte-identical reports.
void emit(const std::string& dir, const std::string& stem, const json& report,
          const std::vector<CheckResult>& checks, const std::string& title) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir + "/" + stem + ".json");
    f << report.dump(2) << "\n";
  }
  {
    std::ofstream f(dir + "/" + stem + ".md");
    f << markdown_summary(title, checks);
  }
  {
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    json manifest{{"report", stem + ".json"},
                  {"config_hash", report.at("config_hash")},
                  {"unix_time_ms",
                   std::chrono::duration_cast<std::chrono::milliseconds>(now).count()}};
    std::ofstream f(dir + "/" + stem + ".manifest.json");
    f << manifest.dump(2) << "\n";
  }
}

int finish(const std::vector<CheckResult>& checks) {
  for (const auto& c : checks)
    if (!c.pass) {
      std::cerr << "verification failure: " << c.name << " (margin " << c.margin << ")"
                << (c.detail.empty() ? "" : " -- " + c.detail) << "\n";
      return 1;
    }
  return 0;
}

std::vector<double> seeded_bump(const DiffusionProblem& p, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> amp(0.4, 1.2), wid(1.0, 2.5);
  const double a = amp(rng), w = wid(rng);
  std::vector<double> u(p.cells());
  for (std::size_t i = 0; i < u.size(); ++i)
    u[i] = a * std::exp(-(p.centers[i] * p.centers[i]) / (w * w));
  return u;
}

// ---------------------------------------------------------------------------

int run_geometry(const Options& o) {
  const auto G = CurvatureProfile::standard(o.kappa, o.alpha);
  const auto flat = CurvatureProfile::constant(0.0);
  std::vector<double> radii;
  for (int i = 1; i <= 32; ++i)
    radii.push_back(o.R * i / 32.0);
  const auto vg = volume_table(G, o.d, radii);
  const auto vf = volume_table(flat, o.d, radii);

  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < radii.size(); ++i)
    rows.push_back({radii[i], vg.volumes[i], vg.volumes[i] / vf.volumes[i]});

  // the decaying profile sits below its constant ceiling: ratio check
  auto rep = bishop_gromov_ratio_check(flat, G, o.d, radii);
  std::vector<CheckResult> checks;
  checks.push_back({"volume ratio vs the model is nonincreasing", rep.nonincreasing,
                    -rep.max_increase, ""});

  json report = config_json("geometry", o);
  report["config_hash"] = hash_hex(config_hash(report));
  report["rows"] = rows.size();
  report["checks"] = json::array();
  for (const auto& c : checks)
    report["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"margin", c.margin}});

  const std::string dir = output_dir(o);
  const std::string stem = "geometry-" + report["config_hash"].get<std::string>();
  write_csv(dir + "/" + stem + ".csv", "R,V_G,ratio", rows);
  emit(dir, stem, report, checks, "Geometry report");
  return finish(checks);
}

int run_cutoff(const Options& o) {
  CutoffProfile phi;
  json extra;
  if (o.alpha == 2.0) {
    auto pr = build_cutoff_alpha2(o.kappa, o.d, o.R, o.gamma,
                                  std::max<std::size_t>(o.grid_n, 512));
    phi = pr.second;
    extra["theta"] = pr.first.theta;
    extra["sandwich_min_slack"] = pr.first.min_slack;
  } else {
    auto ex = choose_exhaustion(o.d, o.kappa, o.alpha, o.gamma * o.R * 1.1 + 4.0);
    phi = build_cutoff_general(ex, o.R, o.gamma);
    extra["gamma_threshold"] = phi.gamma_threshold;
  }

  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < phi.r.size(); ++i)
    rows.push_back({phi.r[i], phi.phi[i], phi.dphi[i], phi.lap_phi[i]});

  std::vector<CheckResult> checks;
  checks.push_back({"cut-off certified (range, plateau, support)", phi.certified(), 0.0, ""});
  checks.push_back({"scaled gradient constant finite", std::isfinite(phi.c1), phi.c1, ""});

  json report = config_json("cutoff", o);
  report["config_hash"] = hash_hex(config_hash(report));
  report["record"] = {{"R", phi.R},         {"gamma", phi.gamma}, {"sup_grad", phi.sup_dphi},
                      {"sup_lap", phi.sup_lap}, {"c1_fit", phi.c1}, {"c2_fit", phi.c2}};
  report["record"].update(extra);

  const std::string dir = output_dir(o);
  const std::string stem = "cutoff-" + report["config_hash"].get<std::string>();
  write_csv(dir + "/" + stem + ".csv", "r,phi,dphi,lap_phi", rows);
  emit(dir, stem, report, checks, "Cut-off report");
  return finish(checks);
}

int run_lyau(const Options& o) {
  auto rep = liyau_case_i(o.alpha, o.kappa, o.d, o.R, o.gamma);
  std::vector<CheckResult> checks;
  checks.push_back({"gradient bound holds on the annulus", rep.ok && rep.margin_min > o.tol_margin,
                    rep.margin_min, ""});

  json report = config_json("lyau", o);
  report["config_hash"] = hash_hex(config_hash(report));
  report["record"] = {{"R1", rep.R1},       {"gamma", rep.gamma},   {"t", rep.t},
                      {"lambda", rep.lambda}, {"Omega1", rep.Omega1}, {"Omega2", rep.Omega2},
                      {"Omega3", rep.Omega3}, {"B", rep.B},           {"sup_lhs", rep.sup_lhs},
                      {"margin_min", rep.margin_min}};

  const std::string dir = output_dir(o);
  emit(dir, "lyau-" + report["config_hash"].get<std::string>(), report, checks,
       "Gradient-estimate report");
  return finish(checks);
}

int run_diffusion_cmd(const Options& o) {
  const auto G = CurvatureProfile::standard(o.kappa, o.alpha);
  auto p = make_diffusion_problem(o.d, o.m, G, std::max(4.0 * o.R, 10.0), o.grid_n);
  auto u0 = seeded_bump(p, o.seed);
  auto run = run_diffusion(p, u0, o.dt, o.horizon);

  std::vector<std::vector<double>> rows;
  for (const auto& s : run.series)
    rows.push_back({s.t, s.mass, s.sup_u, s.support_radius});

  std::vector<CheckResult> checks;
  const double m0 = run.series.front().mass;
  double drift = 0.0;
  for (const auto& s : run.series)
    drift = std::max(drift, std::abs(s.mass - m0) / m0);
  if (o.m >= 1.0)
    checks.push_back({"mass conserved (zero-flux run)", drift <= 1e-8, 1e-8 - drift, ""});
  else
    checks.push_back({"mass nonincreasing (fast diffusion)",
                      run.series.back().mass <= m0 * (1.0 + 1e-10),
                      m0 - run.series.back().mass, ""});
  checks.push_back({"solution stays nonnegative",
                    *std::min_element(run.final_state.u.begin(), run.final_state.u.end()) >=
                        0.0,
                    0.0, ""});

  json report = config_json("diffusion", o);
  report["config_hash"] = hash_hex(config_hash(report));
  report["record"] = {{"mass0", m0},
                      {"mass_final", run.series.back().mass},
                      {"max_drift", drift},
                      {"support_final", run.series.back().support_radius}};

  const std::string dir = output_dir(o);
  const std::string stem = "diffusion-" + report["config_hash"].get<std::string>();
  write_csv(dir + "/" + stem + ".csv", "t,mass,sup_u,support_radius", rows);
  emit(dir, stem, report, checks, "Diffusion report");
  return finish(checks);
}

int run_verify_all(const Options& o) {
  std::vector<CheckResult> checks;

  { // warping exactness
    auto grid = RadialGrid::uniform(10.0, 200);
    auto w = solve_warping(CurvatureProfile::constant(1.0), grid, 1e-13);
    double err = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
      err = std::max(err, std::abs(w.h[i] - std::sinh(grid.nodes[i])));
    checks.push_back({"warping matches sinh reference", err <= 1e-8, 1e-8 - err, ""});
  }
  { // comparison ordering
    auto grid = RadialGrid::uniform(10.0, 400);
    auto low = CurvatureProfile::standard(o.kappa, 2.0);
    auto high = CurvatureProfile::constant(o.kappa * o.kappa);
    auto wl = solve_warping(low, grid, 1e-11);
    auto wh = solve_warping(high, grid, 1e-11);
    auto rep = sturm_compare(grid.nodes, wl.h, wl.hp, wh.h, wh.hp);
    checks.push_back({"warping ordering under ordered coefficients",
                      rep.value_ordered && rep.logderiv_ordered,
                      -std::max(rep.max_value_violation, rep.max_logderiv_violation), ""});
  }
  { // cut-off certification
    auto ex = choose_exhaustion(o.d, o.kappa, std::min(o.alpha, 1.0), 30.0);
    auto phi = build_cutoff_general(ex, 2.0, 3.0);
    checks.push_back({"general cut-off certified", phi.certified(), 0.0, ""});
    auto pr = build_cutoff_alpha2(o.kappa, o.d, 2.0, 1.1);
    checks.push_back({"sharp annulus cut-off certified at gamma 1.1",
                      pr.first.sandwich_ok && pr.second.certified(), pr.first.min_slack, ""});
  }
  { // gradient estimate
    auto rep = liyau_case_i(o.alpha, o.kappa, o.d, 4.0);
    checks.push_back({"gradient bound on the annulus", rep.ok, rep.margin_min, ""});
  }
  { // slow diffusion conservation (compact cap so the support stays interior)
    auto p = make_diffusion_problem(o.d, 2.0, CurvatureProfile::constant(0.0), 12.0, 96);
    std::vector<double> u0(p.cells());
    for (std::size_t i = 0; i < p.cells(); ++i)
      u0[i] = std::max(1.0 - p.centers[i] * p.centers[i] / 4.0, 0.0);
    auto led = check_mass_conservation(p, u0, 0.05, 0.5);
    checks.push_back({"slow-diffusion mass conservation", led.ok, 1e-8 - led.max_drift, ""});
  }
  { // fast diffusion weak conservation
    auto ex = choose_exhaustion(o.d, 0.0, 0.0, 24.0);
    auto p = make_diffusion_problem(o.d, 0.6, CurvatureProfile::constant(0.0), 24.0, 120);
    auto u0 = seeded_bump(p, o.seed);
    auto run = run_diffusion(p, u0, 0.05, 0.5, 10);
    auto phi = build_cutoff_general(ex, 2.0, 3.0);
    auto rep = weak_conservation_inequality(p, run.snapshots.front(), run.snapshots.back(),
                                            run.series.front().t, run.series.back().t, phi);
    checks.push_back({"weak conservation inequality", rep.ok, rep.margin, ""});
  }

  // reports sorted by name for order-independent aggregation
  std::sort(checks.begin(), checks.end(),
            [](const CheckResult& a, const CheckResult& b) { return a.name < b.name; });

  json report = config_json("verify-all", o);
  report["config_hash"] = hash_hex(config_hash(report));
  report["checks"] = json::array();
  for (const auto& c : checks)
    report["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"margin", c.margin}});

  const std::string dir = output_dir(o);
  emit(dir, "verify-all-" + report["config_hash"].get<std::string>(), report, checks,
       "Verification battery");
  std::cout << markdown_summary("Verification battery", checks);
  return finish(checks);
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--alpha", o.alpha, "curvature decay rate in [-2, 2]");
  cmd->add_option("--kappa", o.kappa, "curvature magnitude (>= 0)");
  cmd->add_option("--d", o.d, "dimension (>= 2)");
  cmd->add_option("--gamma", o.gamma, "annulus ratio (> 1)");
  cmd->add_option("--R", o.R, "ball radius");
  cmd->add_option("--m", o.m, "diffusion exponent (> 0)");
  cmd->add_option("--grid-n", o.grid_n, "grid resolution");
  cmd->add_option("--dt", o.dt, "time step");
  cmd->add_option("--horizon", o.horizon, "final time");
  cmd->add_option("--out", o.out, "output directory (default: $CUTOFFLAB_OUT or .)");
  cmd->add_option("--seed", o.seed, "RNG seed for generated initial data");
  cmd->add_option("--tol-margin", o.tol_margin, "extra required verification margin");
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"cutofflab: radial-geometry cut-off and diffusion laboratory"};
  app.require_subcommand(1);
  Options o;
  auto* geometry = app.add_subcommand("geometry", "volume tables and ratio monotonicity");
  auto* cutoff = app.add_subcommand("cutoff", "build and certify a cut-off profile");
  auto* lyau = app.add_subcommand("lyau", "verify the gradient estimate on an annulus");
  auto* diffusion = app.add_subcommand("diffusion", "run the radial diffusion solver");
  auto* verify_all = app.add_subcommand("verify-all", "run the full verification battery");
  for (auto* cmd : {geometry, cutoff, lyau, diffusion, verify_all})
    add_common(cmd, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (geometry->parsed())
      return run_geometry(o);
    if (cutoff->parsed())
      return run_cutoff(o);
    if (lyau->parsed())
      return run_lyau(o);
    if (diffusion->parsed())
      return run_diffusion_cmd(o);
    return run_verify_all(o);
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "verification failure: " << e.what() << "\n";
    return 1;
  }
}
