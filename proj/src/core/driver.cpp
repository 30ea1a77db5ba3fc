#include "ewm/driver.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

#include "ewm/error.hpp"
#include "ewm/geodesic.hpp"
#include "ewm/io.hpp"
#include "ewm/regularity.hpp"
#include "ewm/stationary.hpp"

namespace ewm {

using nlohmann::json;

namespace {

constexpr double pi = std::numbers::pi;
constexpr double nan = std::numeric_limits<double>::quiet_NaN();

Check make_check(std::string name, double value, double limit, bool passed) {
  Check c;
  c.name = std::move(name);
  c.value = value;
  c.limit = limit;
  c.passed = passed;
  c.rate = nan;
  return c;
}

Check below(std::string name, double value, double limit) {
  return make_check(std::move(name), value, limit, std::isfinite(value) && value < limit);
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json checks_json(const std::vector<Check>& checks) {
  json arr = json::array();
  for (const auto& c : checks) {
    json j{{"name", c.name}, {"residual", finite_or_null(c.value)}, {"limit", c.limit}, {"passed", c.passed}};
    if (std::isfinite(c.rate)) j["rate"] = c.rate;
    if (!c.constants.empty()) j["constants"] = c.constants;
    arr.push_back(j);
  }
  return arr;
}

bool all_passed(const std::vector<Check>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

std::string check_lines(const std::vector<Check>& checks) {
  std::ostringstream os;
  for (const auto& c : checks) {
    os << (c.passed ? "PASS " : "FAIL ") << c.name << " = " << c.value;
    if (std::isfinite(c.rate)) os << " (rate " << c.rate << ")";
    os << "\n";
  }
  return os.str();
}

}  // namespace

std::vector<Check> geometry_suite(const SurfaceProfile& p, int samples, std::uint64_t seed) {
  std::vector<Check> out;
  const double scale = p.R() / pi;
  const double K = std::max(0.0, 1.05 * max_curvature(p, 0.0, p.R()));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> rad(0.02 * scale, 0.5 * scale), ang(0.02, 3.1);
  const bool round = p.kind() == SurfaceProfile::Kind::round;
  int violations = 0;
  double cosines = 0.0, remark7 = 0.0, symmetry = 0.0, margin = std::numeric_limits<double>::infinity();
  std::vector<GeodesicTriangle> tris;
  for (int i = 0; i < samples; ++i) {
    const double r = rad(rng), rp = rad(rng), th = ang(rng);
    auto t = geodesic_distance(p, r, rp, th);
    attach_comparison(t, K);
    if (!(t.dK <= t.d + 1e-12 && t.d <= t.d0 + 1e-12)) ++violations;
    margin = std::min({margin, t.d - t.dK, t.d0 - t.d});
    remark7 = std::max(remark7, std::abs(p.f(r) * std::sin(t.beta) - p.f(rp) * std::sin(t.alpha)));
    if (round) {
      const double exact = std::acos(std::cos(r) * std::cos(rp) + std::sin(r) * std::sin(rp) * std::cos(th));
      cosines = std::max(cosines, std::abs(t.d - exact));
    }
    if (i < 50) symmetry = std::max(symmetry, std::abs(t.d - geodesic_distance(p, rp, r, th).d));
    if (i < 20) tris.push_back(t);
  }
  auto bracket = make_check("comparison d_K <= d <= d_0 violations", violations, 0.5, violations == 0);
  bracket.constants = {K, static_cast<double>(samples), margin};
  out.push_back(bracket);
  if (round) out.push_back(below("law of cosines error", cosines, 1e-6));
  out.push_back(below("f(r) sin(beta) - f(r') sin(alpha)", remark7, 1e-6));
  out.push_back(below("distance symmetry", symmetry, 1e-10));
  double dy = 0.0, eik = 0.0, gb = 0.0, mmin = std::numeric_limits<double>::infinity(), mmax = 0.0;
  for (const auto& t : tris) {
    const auto rep = angle_identities_check(p, t);
    dy = std::max(dy, rep.dy_drp_relerr);
    eik = std::max(eik, rep.eikonal_relerr);
    gb = std::max(gb, rep.gauss_bonnet_residual);
    mmin = std::min(mmin, rep.ratio_m_min);
    mmax = std::max(mmax, rep.ratio_m_max);
  }
  out.push_back(below("dy/dr' = 2 d cos(alpha) relative error", dy, 1e-4));
  out.push_back(below("eikonal relative residual", eik, 1e-4));
  out.push_back(below("Gauss-Bonnet residual", gb, 1e-5));
  auto ratio = make_check("m r r' range", mmax / mmin, 0.0, mmin > 0.0 && std::isfinite(mmax));
  ratio.constants = {mmin, mmax};
  out.push_back(ratio);
  const auto path = geodesic_trace(p, 0.3 * scale, 0.0, 1.0, std::min(1.0, 0.2 * p.R()), 1e-4, 100);
  out.push_back(below("Clairaut drift", path.clairaut_drift, 1e-8));
  return out;
}

std::vector<Check> regularity_suite(const SurfaceProfile& p, int l) {
  std::vector<Check> out;
  for (int k = 0; k <= 3; ++k) {
    const auto st = intertwining_study(p, k);
    auto c = make_check("intertwining rate l=" + std::to_string(k), st.residual.back(), 0.0,
                        st.rate >= 1.8 && st.rate <= 2.2);
    c.rate = st.rate;
    c.constants = st.residual;
    out.push_back(c);
  }
  if (p.kind() == SurfaceProfile::Kind::flat || p.kind() == SurfaceProfile::Kind::round) {
    double worst = 0.0;
    const int lmax = p.kind() == SurfaceProfile::Kind::flat ? 3 : 0;
    for (int k = 0; k <= lmax; ++k)
      for (int i = 1; i < 100; ++i) worst = std::max(worst, std::abs(rhs_coefficient(p, k, p.R() * i / 100.0)));
    out.push_back(make_check("analytically zero rhs coefficient", worst, 0.0, worst == 0.0));
  }
  if (p.closed()) {
    double worst = 0.0;
    for (int k = 0; k <= 3; ++k)
      for (int j = 5; j <= 20; ++j) {
        const double r = p.R() * std::ldexp(1.0, -j);
        worst = std::max(worst, std::abs(rhs_coefficient(p, k, r)));
      }
    out.push_back(make_check("rhs coefficient near r = 0", worst, 1e3, worst < 1e3));
  }
  {
    double err[2];
    const int lt = std::max(l, 0);
    for (int k = 0; k < 2; ++k) {
      const Grid grid(p.R(), 400 << k);
      std::vector<double> v(grid.N + 1);
      for (int i = 0; i <= grid.N; ++i) {
        const double x = pi * grid.r(i) / p.R();
        v[i] = std::pow(std::sin(x), std::max(lt, 1)) * (1 + 0.3 * std::cos(x));
      }
      v[0] = v[grid.N] = 0.0;
      const auto back = inverse_w_transform(p, grid, w_transform(p, grid, v, lt), lt);
      err[k] = 0.0;
      for (int i = 0; i <= grid.N; ++i) err[k] = std::max(err[k], std::abs(back[i] - v[i]));
    }
    auto c = make_check("w-transform round trip l=" + std::to_string(lt), err[1], 0.0, std::log2(err[0] / err[1]) > 1.8);
    c.rate = std::log2(err[0] / err[1]);
    c.constants = {err[0], err[1]};
    out.push_back(c);
  }
  {
    double g0 = 0.0;
    for (const auto& M : christoffel(0.0, 0.0))
      for (const auto& row : M)
        for (double v : row) g0 = std::max(g0, std::abs(v));
    out.push_back(make_check("Christoffel symbols at the chart origin", g0, 0.0, g0 == 0.0));
    const double dg = metric_derivative(0.1, 0.0)[0][0][0];
    out.push_back(below("dg_xx/dx(0.1, 0) - 0.2/0.9801", std::abs(dg - 0.2 / 0.9801), 1e-6));
    std::vector<double> C;
    for (double rho : {0.1, 0.2, 0.3}) C.push_back(christoffel_linear_constant(rho));
    const double spread = *std::max_element(C.begin(), C.end()) / *std::min_element(C.begin(), C.end());
    auto c = make_check("Christoffel linear constant spread", spread, 1.1, spread < 1.1);
    c.constants = C;
    out.push_back(c);
  }
  return out;
}

ConeAudit cone_audit(const std::vector<FieldState>& snapshots, const std::vector<DiagnosticsRecord>& series) {
  ConeAudit a;
  if (snapshots.empty()) return a;
  const double E0 = series.empty() ? energy(snapshots.front()) : series.front().E;
  for (const auto& r : series) a.flux_excess = std::max(a.flux_excess, r.flux - E0);
  const std::size_t n = snapshots.size();
  const std::size_t stride = std::max<std::size_t>(1, n / 12);
  const double R = snapshots.front().grid.R;
  for (std::size_t i = 0; i < n; i += stride)
    for (std::size_t j = i; j < n; j += stride)
      for (double frac : {0.25, 0.5, 0.75, 1.0}) {
        const auto c = cone_monotonicity_check(snapshots[i], snapshots[j], frac * R, 0.0);
        a.cone_violation = std::max(a.cone_violation, E0 > 0 ? c.violation / E0 : c.violation);
        ++a.cone_samples;
      }
  return a;
}

namespace {

struct Writer {
  const RunConfig& cfg;
  std::filesystem::path dir;
  CommandResult& res;

  void json_file(const std::string& name, json j) {
    j["config_hash"] = cfg.hash();
    if (!cfg.wants("json")) return;
    const auto p = (dir / name).string();
    write_text(p, j.dump(2) + "\n");
    res.files.push_back(p);
  }
  bool csv(const std::string& name, std::string& path) {
    if (!cfg.wants("csv")) return false;
    path = (dir / name).string();
    res.files.push_back(path);
    return true;
  }
};

StationarySolution solve(const RunConfig& cfg, const SurfaceProfile& surface) {
  if (cfg.l < 1) fail(ErrorCode::config, "/l: must be >= 1 for stationary and evolution runs");
  StationaryOptions so;
  so.tol = cfg.solver.tol;
  so.max_iter = cfg.solver.max_iter;
  so.multistart = cfg.solver.multistart;
  so.seed = cfg.solver.seed;
  return solve_stationary(surface, TargetProfile::round(), cfg.l, cfg.omega, cfg.grid.N, nullptr, so);
}

json solution_json(const StationarySolution& sol) {
  const double bound = sol.l * sol.target.vol();
  return json{{"l", sol.l},
              {"omega", sol.omega},
              {"N", sol.grid.N},
              {"surface", sol.surface.name()},
              {"action", sol.action},
              {"bound_l_vol", bound},
              {"gap", bound - sol.action},
              {"residual_norm", sol.residual_norm},
              {"el_residual_norm", sol.el_residual_norm},
              {"gradient_norm", sol.gradient_norm},
              {"converged", sol.converged},
              {"iterations", sol.iterations},
              {"degree", degree_of(sol.target, sol.phi.front(), sol.phi.back(), sol.l)},
              {"exponents",
               {{"a_left", finite_or_null(sol.exponents.a_left)},
                {"p_left", finite_or_null(sol.exponents.p_left)},
                {"a_right", finite_or_null(sol.exponents.a_right)},
                {"p_right", finite_or_null(sol.exponents.p_right)}}},
              {"multistart_actions", sol.multistart_actions}};
}

json drifts_json(const Drifts& d) { return json{{"energy", d.energy}, {"charge", d.charge}}; }

double max_identity(const std::vector<DiagnosticsRecord>& s) {
  double m = 0.0;
  for (const auto& r : s) m = std::max(m, r.identity_residual);
  return m;
}

void run_validate(const RunConfig& cfg, Writer& w) {
  const auto rep = validate_profile(cfg.make_surface());
  json checks = json::array();
  std::ostringstream os;
  for (const auto& c : rep.checks) {
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"measured", finite_or_null(c.measured)}});
    os << (c.passed ? "PASS " : "FAIL ") << c.name << " (" << c.measured << ")\n";
  }
  w.json_file("validate.json",
              {{"profile", rep.profile}, {"pole_margin", rep.pole_margin}, {"checks", checks}, {"all_passed", rep.all_passed()}});
  w.res.summary = os.str();
  w.res.exit_code = rep.all_passed() ? 0 : 1;
}

void run_stationary(const RunConfig& cfg, Writer& w) {
  const auto sol = solve(cfg, cfg.make_surface());
  std::string path;
  if (w.csv("solution.csv", path)) write_solution_csv(path, sol);
  w.json_file("solution.json", solution_json(sol));
  std::ostringstream os;
  os << "action " << format_double(sol.action) << " (l vol = " << format_double(sol.l * sol.target.vol()) << ")\n"
     << "residual " << sol.residual_norm << ", iterations " << sol.iterations
     << (sol.converged ? ", converged" : ", NOT converged") << "\n";
  w.res.summary = os.str();
  w.res.exit_code = sol.converged ? 0 : 2;
}

RunOptions run_options(const RunConfig& cfg, double T) {
  RunOptions ro;
  ro.T = T;
  ro.cfl = cfg.evolve.cfl;
  ro.record_every = cfg.evolve.record_every;
  ro.constraint_limit = cfg.evolve.constraint_limit;
  return ro;
}

void run_evolve(const RunConfig& cfg, Writer& w) {
  const auto sol = solve(cfg, cfg.make_surface());
  if (!sol.converged) {
    w.res.summary = "stationary solver did not converge; evolution refused\n";
    w.res.exit_code = 2;
    return;
  }
  const auto reference = state_from_stationary(sol, cfg.omega);
  const auto initial = perturb_state(reference, cfg.evolve.delta, cfg.evolve.shape, cfg.stability.seed);
  const auto res = run(initial, run_options(cfg, cfg.evolve.T));
  const auto series = diagnostics_series(res.snapshots, cfg.omega, cfg.diagnostics.delta_hoelder, &reference);
  const auto audit = cone_audit(res.snapshots, series);
  std::string path;
  if (w.csv("series.csv", path)) write_series_csv(path, series);
  if (w.csv("snapshot.csv", path)) write_snapshot_csv(path, res.final_state);
  const auto& fs = res.final_state;
  w.json_file("snapshot.json", {{"t", fs.t}, {"l", fs.l}, {"N", fs.grid.N}, {"R", fs.grid.R}});
  const auto d = relative_drifts(series);
  w.json_file("evolve.json", {{"aborted", res.aborted},
                              {"failure", res.failure},
                              {"steps", res.steps},
                              {"dt", res.dt},
                              {"drifts", drifts_json(d)},
                              {"max_identity_residual", max_identity(series)},
                              {"flux_excess", audit.flux_excess},
                              {"cone_violation", audit.cone_violation},
                              {"cone_samples", audit.cone_samples}});
  std::ostringstream os;
  os << "steps " << res.steps << ", dt " << res.dt << ", energy drift " << d.energy << ", charge drift " << d.charge
     << "\n";
  if (res.aborted) os << "aborted: " << res.failure << "\n";
  w.res.summary = os.str();
  w.res.exit_code = res.aborted ? 3 : 0;
}

void run_stability(const RunConfig& cfg, Writer& w) {
  const auto sol = solve(cfg, cfg.make_surface());
  if (!sol.converged) {
    w.res.summary = "stationary solver did not converge; experiment refused\n";
    w.res.exit_code = 2;
    return;
  }
  StabilityOptions so;
  so.delta = cfg.stability.delta;
  so.T = cfg.evolve.T;
  so.epsilon = cfg.stability.epsilon;
  so.shape = cfg.stability.shape;
  so.seed = cfg.stability.seed;
  so.run = run_options(cfg, cfg.evolve.T);
  so.delta_hoelder = cfg.diagnostics.delta_hoelder;
  const auto r = stability_experiment(sol, cfg.omega, so);
  const auto audit = cone_audit(r.run.snapshots, r.series);
  std::string path;
  if (w.csv("series.csv", path)) write_series_csv(path, r.series);
  const std::string verdict = r.run.aborted ? "aborted" : (r.stable ? "stable" : "unstable");
  w.json_file("stability.json", {{"verdict", verdict},
                                 {"sup_dist", r.sup_dist},
                                 {"epsilon", so.epsilon},
                                 {"delta", so.delta},
                                 {"T", so.T},
                                 {"max_energy", r.series.empty() ? 0.0 : r.series.front().E},
                                 {"drifts", drifts_json(r.drifts)},
                                 {"max_identity_residual", max_identity(r.series)},
                                 {"flux_excess", audit.flux_excess},
                                 {"cone_violation", audit.cone_violation},
                                 {"failure", r.run.failure}});
  std::ostringstream os;
  os << "verdict " << verdict << ": sup dist " << r.sup_dist << " (epsilon " << so.epsilon << ")\n";
  w.res.summary = os.str();
  w.res.exit_code = r.run.aborted ? 3 : (r.stable ? 0 : 1);
}

void run_suite(const std::vector<Check>& checks, const std::string& file, const std::string& profile, Writer& w) {
  w.json_file(file, {{"profile", profile}, {"checks", checks_json(checks)}, {"all_passed", all_passed(checks)}});
  w.res.summary = check_lines(checks);
  w.res.exit_code = all_passed(checks) ? 0 : 1;
}

}  // namespace

CommandResult run_command(const RunConfig& cfg, const std::string& subcommand) {
  CommandResult res;
  try {
    std::filesystem::path dir(cfg.output.directory);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) fail(ErrorCode::io, "cannot create output directory " + dir.string() + ": " + ec.message());
    Writer w{cfg, dir, res};
    if (subcommand == "validate") {
      run_validate(cfg, w);
    } else if (subcommand == "stationary") {
      run_stationary(cfg, w);
    } else if (subcommand == "evolve") {
      run_evolve(cfg, w);
    } else if (subcommand == "stability") {
      run_stability(cfg, w);
    } else if (subcommand == "geometry-check") {
      const auto p = cfg.make_surface();
      run_suite(geometry_suite(p, cfg.geometry.samples, cfg.stability.seed), "geometry.json", p.name(), w);
    } else if (subcommand == "regularity-check") {
      const auto p = cfg.make_surface();
      run_suite(regularity_suite(p, cfg.l), "regularity.json", p.name(), w);
    } else {
      fail(ErrorCode::invalid_argument, "unknown subcommand '" + subcommand + "'");
    }
  } catch (const Error& e) {
    res.summary += std::string("error: ") + e.what() + "\n";
    res.exit_code = e.code() == ErrorCode::evolution_aborted ? 3 : 2;
  }
  return res;
}

}  // namespace ewm
