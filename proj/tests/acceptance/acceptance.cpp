// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "ewm/diagnostics.hpp"
#include "ewm/driver.hpp"
#include "ewm/error.hpp"
#include "ewm/evolution.hpp"
#include "ewm/geodesic.hpp"
#include "ewm/regularity.hpp"
#include "ewm/stationary.hpp"

using namespace ewm;
using std::numbers::pi;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double bogomolny(double r, int l) { return 2.0 * std::atan(std::pow(std::tan(r / 2), l)); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Runs that later criteria audit for flux and cone monotonicity.
std::vector<std::pair<std::vector<FieldState>, std::vector<DiagnosticsRecord>>> accepted_runs;

StationarySolution rotating(int N, double omega, int l = 1) {
  return solve_stationary(SurfaceProfile::round(), TargetProfile::round(), l, omega, N);
}

Outcome harmonic_map_oracle() {
  std::ostringstream os;
  bool ok = true;
  for (int l = 1; l <= 3; ++l) {
    const auto t0 = Clock::now();
    const auto sol = rotating(2000, 0.0, l);
    const double secs = seconds_since(t0);
    double err = 0.0;
    for (int i = 0; i <= sol.grid.N; ++i) err = std::max(err, std::abs(sol.phi[i] - bogomolny(sol.grid.r(i), l)));
    const double rel = std::abs(sol.action - 4 * pi * l) / (4 * pi * l);
    ok = ok && sol.converged && err < 1e-3 && rel < 1e-3 && secs < 30.0;
    os << "l=" << l << ": max|phi-phi*|=" << err << " action rel err=" << rel << " t=" << secs << "s; ";
  }
  return {ok, os.str()};
}

Outcome strict_gap() {
  const auto sol = rotating(2000, 0.5);
  const double bound = 4 * pi - pi / 3;
  std::ostringstream os;
  os << "action=" << sol.action << " competitor bound=" << bound << " l vol=" << 4 * pi << " gap=" << 4 * pi - sol.action;
  return {sol.converged && sol.action <= bound + 1e-3 && sol.action < 4 * pi, os.str()};
}

Outcome conservation() {
  const double omega = 0.5;
  const auto ref = state_from_stationary(rotating(2000, omega), omega);
  const auto init = perturb_state(ref, 1e-3, 0, 0);
  RunOptions ro;
  ro.T = 1.0;
  ro.cfl = 0.4;
  const auto res = run(init, ro);
  const auto series = diagnostics_series(res.snapshots, omega, 0.1, &ref);
  double ident = 0.0;
  for (const auto& r : series) ident = std::max(ident, r.identity_residual);
  const auto d = relative_drifts(series);
  accepted_runs.emplace_back(res.snapshots, series);
  std::ostringstream os;
  os << "energy drift=" << d.energy << " charge drift=" << d.charge << " max identity residual=" << ident
     << " records=" << series.size();
  return {!res.aborted && d.energy < 1e-4 && d.charge < 1e-4 && ident < 1e-10, os.str()};
}

Outcome rotating_oracle() {
  const double omega = 0.5;
  double e[3];
  const int Ns[3] = {500, 1000, 2000};
  for (int k = 0; k < 3; ++k) {
    const auto s0 = state_from_stationary(rotating(Ns[k], omega), omega);
    RunOptions ro;
    ro.T = 1.0;
    ro.record_every = 1 << 30;
    const auto res = run(s0, ro);
    const auto exact = rotated(s0, omega * 1.0);
    e[k] = 0.0;
    for (std::size_t i = 0; i < exact.u.size(); ++i)
      for (int c = 0; c < 3; ++c) e[k] = std::max(e[k], std::abs(res.final_state.u[i][c] - exact.u[i][c]));
  }
  const double r1 = std::log2(e[0] / e[1]), r2 = std::log2(e[1] / e[2]);
  std::ostringstream os;
  os << "errors " << e[0] << ", " << e[1] << ", " << e[2] << "; rates " << r1 << ", " << r2;
  return {r1 >= 1.8 && r1 <= 2.2 && r2 >= 1.8 && r2 <= 2.2, os.str()};
}

Outcome stability() {
  const double omega = 0.5;
  const auto sol = rotating(2000, omega);
  auto experiment = [&](double delta, double T) {
    StabilityOptions o;
    o.delta = delta;
    o.T = T;
    o.epsilon = 1e-2;
    auto r = stability_experiment(sol, omega, o);
    accepted_runs.emplace_back(r.run.snapshots, r.series);
    return r;
  };
  const auto zero = experiment(0.0, 1.0);
  const auto small = experiment(1e-3, 5.0);
  double sup[3];
  const double deltas[3] = {1e-4, 1e-3, 1e-2};
  for (int k = 0; k < 3; ++k) sup[k] = k == 1 ? small.sup_dist : experiment(deltas[k], 5.0).sup_dist;
  const bool monotone = sup[0] <= sup[1] && sup[1] <= sup[2];
  std::ostringstream os;
  os << "delta=0 sup dist=" << zero.sup_dist << " (T=1); delta=1e-3 sup dist=" << small.sup_dist
     << " (T=5); sup dist over delta {1e-4,1e-3,1e-2}: " << sup[0] << ", " << sup[1] << ", " << sup[2];
  return {zero.sup_dist < 1e-2 && small.sup_dist < 1e-2 && small.stable && monotone, os.str()};
}

Outcome geometry() {
  const auto t0 = Clock::now();
  const auto round = geometry_suite(SurfaceProfile::round(), 200, 1);
  bool ok = true;
  std::ostringstream os;
  for (const auto& c : round) {
    ok = ok && c.passed;
    if (!c.passed) os << "round check failed: " << c.name << "=" << c.value << "; ";
  }
  const auto bumpy = geometry_suite(SurfaceProfile::bumpy(0.05), 1000, 2);
  const auto& bracket = bumpy.front();
  ok = ok && bracket.passed;
  const double secs = seconds_since(t0);
  os << "round suite " << (ok ? "passed" : "failed") << "; bumpy: " << bracket.value << " violations of d_K <= d <= d_0 in "
     << static_cast<int>(bracket.constants[1]) << " triangles (K=" << bracket.constants[0] << "); t=" << secs << "s";
  return {ok && secs < 60.0, os.str()};
}

Outcome flux_and_cone() {
  double flux = -1e300, cone = 0.0;
  int samples = 0;
  for (const auto& [snaps, series] : accepted_runs) {
    const auto a = cone_audit(snaps, series);
    flux = std::max(flux, a.flux_excess);
    cone = std::max(cone, a.cone_violation);
    samples += a.cone_samples;
  }
  std::ostringstream os;
  os << accepted_runs.size() << " runs; max(flux - E)=" << flux << "; max cone violation / E=" << cone << " over "
     << samples << " (T1,T2,R) samples";
  return {!accepted_runs.empty() && flux <= 1e-6 && cone <= 1e-6, os.str()};
}

Outcome intertwining() {
  bool ok = true;
  std::ostringstream os;
  for (const auto& p : {SurfaceProfile::flat(1.0), SurfaceProfile::round(), SurfaceProfile::bumpy(0.05)}) {
    os << p.name() << " rates";
    for (int l = 0; l <= 3; ++l) {
      const double rate = intertwining_study(p, l).rate;
      ok = ok && rate >= 1.8 && rate <= 2.2;
      os << " " << rate;
    }
    os << "; ";
  }
  double zero = 0.0;
  for (int i = 1; i < 100; ++i) {
    for (int l = 0; l <= 3; ++l) zero = std::max(zero, std::abs(rhs_coefficient(SurfaceProfile::flat(1.0), l, i / 100.0)));
    zero = std::max(zero, std::abs(rhs_coefficient(SurfaceProfile::round(), 0, pi * i / 100.0)));
  }
  os << "max |c_l| on flat and round l=0: " << zero;
  return {ok && zero == 0.0, os.str()};
}

Outcome christoffel_expansion() {
  double g0 = 0.0;
  for (const auto& M : christoffel(0.0, 0.0))
    for (const auto& row : M)
      for (double v : row) g0 = std::max(g0, std::abs(v));
  const double dg = metric_derivative(0.1, 0.0)[0][0][0];
  double lo = 1e300, hi = 0.0;
  std::ostringstream os;
  os << "|Gamma(0,0)|=" << g0 << " dg_xx/dx(0.1,0)=" << dg << " C(rho):";
  for (double rho : {0.1, 0.2, 0.3}) {
    const double C = christoffel_linear_constant(rho);
    lo = std::min(lo, C);
    hi = std::max(hi, C);
    os << " " << C;
  }
  return {g0 == 0.0 && std::abs(dg - 0.204061) <= 1e-6 && std::isfinite(hi) && hi / lo < 1.1, os.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"harmonic-map oracle", harmonic_map_oracle},
      {"strict gap below l vol", strict_gap},
      {"conservation", conservation},
      {"rotating-solution oracle", rotating_oracle},
      {"stability experiment", stability},
      {"geometry suite", geometry},
      {"flux and cone monotonicity", flux_and_cone},
      {"intertwining identity", intertwining},
      {"Christoffel expansion", christoffel_expansion},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("[%s] criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed ? 1 : 0;
}
