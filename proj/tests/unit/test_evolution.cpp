#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ewm/diagnostics.hpp"
#include "ewm/error.hpp"
#include "ewm/evolution.hpp"

using namespace ewm;
using std::numbers::pi;

namespace {

StationarySolution rotating(int N, double omega, int l = 1) {
  return solve_stationary(SurfaceProfile::round(), TargetProfile::round(), l, omega, N);
}

double max_diff(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (int k = 0; k < 3; ++k) m = std::max(m, std::abs(a[i][k] - b[i][k]));
  return m;
}

// max |u(t) - exp(A omega t) u(0)| after evolving stationary data to t = 1.
double rotation_error(int N, double omega) {
  const auto s0 = state_from_stationary(rotating(N, omega), omega);
  RunOptions ro;
  ro.T = 1.0;
  ro.record_every = 1 << 30;
  const auto res = run(s0, ro);
  REQUIRE_FALSE(res.aborted);
  return max_diff(res.final_state.u, rotated(s0, omega * 1.0).u);
}

}  // namespace

TEST_CASE("pole state is a fixed point") {
  auto s = pole_state(SurfaceProfile::bumpy(0.05), 200, 2);
  const auto s0 = s;
  for (int k = 0; k < 10; ++k) step(s, cfl_step(s, 0.5));
  CHECK(max_diff(s.u, s0.u) == 0.0);
  CHECK(max_diff(s.v, s0.v) == 0.0);
  CHECK(energy(s) == 0.0);
}

TEST_CASE("step_raw is reversible before projection") {
  const auto base = state_from_stationary(rotating(400, 0.5), 0.5);
  auto s = perturb_state(base, 1e-2, 1, 7);
  const auto s0 = s;
  const double dt = cfl_step(s, 0.4);
  step_raw(s, dt);
  step_raw(s, -dt);
  CHECK(max_diff(s.u, s0.u) < 1e-12);
  CHECK(max_diff(s.v, s0.v) < 1e-12);
}

TEST_CASE("acceleration satisfies the constraint identity") {
  const auto base = state_from_stationary(rotating(400, 0.3, 2), 0.3);
  const auto s = perturb_state(base, 5e-2, 1, 11);
  const auto a = acceleration(s);
  double worst = 0.0;
  for (int i = 1; i < s.grid.N; ++i) {
    const auto& u = s.u[i];
    const auto& v = s.v[i];
    const double ua = u[0] * a[i][0] + u[1] * a[i][1] + u[2] * a[i][2];
    const double vv = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    worst = std::max(worst, std::abs(ua + vv));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("constraints hold after projected steps") {
  auto s = perturb_state(state_from_stationary(rotating(300, 0.5), 0.5), 1e-2, 1, 3);
  for (int k = 0; k < 50; ++k) step(s, cfl_step(s, 0.4));
  const auto ce = constraint_errors(s);
  CHECK(ce.norm_error < 1e-12);
  CHECK(ce.tangency_error < 1e-10);
}

TEST_CASE("CFL violations are refused") {
  auto s = pole_state(SurfaceProfile::round(), 100, 1);
  CHECK_THROWS_AS(step(s, 1.01 * cfl_step(s, 1.0)), Error);
  RunOptions ro;
  ro.cfl = 1.5;
  CHECK_THROWS_AS(run(s, ro), Error);
  ro.cfl = 0.0;
  CHECK_THROWS_AS(run(s, ro), Error);
}

TEST_CASE("state_from_stationary builds the rotating data") {
  const auto sol = rotating(400, 0.5);
  const auto s = state_from_stationary(sol, 0.5);
  const auto ce = constraint_errors(s);
  CHECK(ce.norm_error < 1e-15);
  CHECK(ce.tangency_error < 1e-15);
  CHECK(rotation_defect(s, 0.5) == 0.0);
  auto bad = sol;
  bad.converged = false;
  CHECK_THROWS_AS(state_from_stationary(bad, 0.5), Error);
}

TEST_CASE("perturbation is linear in delta") {
  const auto base = state_from_stationary(rotating(400, 0.5), 0.5);
  const auto same = perturb_state(base, 0.0, 1, 5);
  CHECK(max_diff(same.u, base.u) == 0.0);
  CHECK_THROWS_AS(perturb_state(base, -1e-3, 0, 0), Error);
  double slope[3];
  const double deltas[3] = {1e-4, 1e-3, 1e-2};
  for (int k = 0; k < 3; ++k) {
    const auto p = perturb_state(base, deltas[k], 1, 5);
    const auto ce = constraint_errors(p);
    CHECK(ce.norm_error < 1e-14);
    CHECK(ce.tangency_error < 1e-14);
    slope[k] = std::sqrt(energy_norm_sq(p, base)) / deltas[k];
  }
  CHECK(std::abs(slope[1] / slope[0] - 1.0) < 0.02);
  CHECK(std::abs(slope[2] / slope[0] - 1.0) < 0.02);
}

TEST_CASE("rotating solution oracle converges at second order") {
  const double e1 = rotation_error(200, 0.5);
  const double e2 = rotation_error(400, 0.5);
  const double e3 = rotation_error(800, 0.5);
  MESSAGE("rotation errors " << e1 << " " << e2 << " " << e3);
  const double rate = std::log2((e1 - e2) / (e2 - e3));
  CHECK(rate > 1.8);
  CHECK(rate < 2.2);
}

TEST_CASE("energy and charge drifts shrink at second order") {
  const auto base = state_from_stationary(rotating(400, 0.5), 0.5);
  const auto s0 = perturb_state(base, 1e-1, 1, 2);
  double de[2], dq[2];
  for (int k = 0; k < 2; ++k) {
    RunOptions ro;
    ro.T = 1.0;
    ro.cfl = 0.4 / (1 << k);
    ro.record_every = 5 << k;
    const auto res = run(s0, ro);
    REQUIRE_FALSE(res.aborted);
    const auto d = relative_drifts(diagnostics_series(res.snapshots, 0.5, 0.1));
    de[k] = d.energy;
    dq[k] = d.charge;
  }
  MESSAGE("energy drift " << de[0] << " -> " << de[1] << ", charge drift " << dq[0] << " -> " << dq[1]);
  CHECK(de[0] < 1e-4);
  CHECK(dq[0] < 1e-4);
  CHECK(de[0] / de[1] > 3.0);
}

TEST_CASE("run aborts with a labeled failure on blow-up") {
  auto s = state_from_stationary(rotating(200, 0.5), 0.5);
  s.u[100] = {0.0, 1e3, 0.0};
  RunOptions ro;
  ro.T = 0.1;
  const auto res = run(s, ro);
  CHECK(res.aborted);
  CHECK(res.failure.find("constraint") != std::string::npos);
}
