#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <string>
#include <vector>

#include "ewm/ewm.h"

using std::numbers::pi;

TEST_CASE("surface handles and error reporting") {
  ewm_surface* s = nullptr;
  REQUIRE(ewm_surface_bumpy(0.05, &s) == EWM_OK);
  CHECK(ewm_surface_extent(s) == doctest::Approx(pi));
  double jet[4];
  CHECK(ewm_surface_eval(s, 0.0, jet) == EWM_OK);
  CHECK(jet[0] == 0.0);
  CHECK(jet[1] == doctest::Approx(1.0));
  CHECK(ewm_surface_eval(s, -1.0, jet) == EWM_DOMAIN);
  CHECK(std::strlen(ewm_last_error()) > 0);
  ewm_surface_free(s);
  ewm_surface* bad = nullptr;
  CHECK(ewm_surface_bumpy(-0.5, &bad) != EWM_OK);
  CHECK(bad == nullptr);
  CHECK(ewm_surface_from_csv("/nonexistent.csv", &bad) != EWM_OK);
  CHECK(ewm_surface_round(nullptr) == EWM_INVALID_ARGUMENT);
  CHECK(std::string(ewm_status_string(EWM_CONFIG)) == "configuration error");
}

TEST_CASE("geometry through the C API") {
  ewm_surface* s = nullptr;
  REQUIRE(ewm_surface_round(&s) == EWM_OK);
  double t[3];
  REQUIRE(ewm_geodesic_distance(s, 0.2, 0.3, pi / 2, t) == EWM_OK);
  CHECK(t[0] == doctest::Approx(std::acos(std::cos(0.2) * std::cos(0.3))).epsilon(1e-10));
  double c = 0.0;
  REQUIRE(ewm_rhs_coefficient(s, 1, pi / 2, &c) == EWM_OK);
  CHECK(c == doctest::Approx(-2.0));
  ewm_surface_free(s);
}

TEST_CASE("stationary solve, evolution and diagnostics") {
  ewm_surface* s = nullptr;
  REQUIRE(ewm_surface_round(&s) == EWM_OK);
  ewm_solution* sol = nullptr;
  REQUIRE(ewm_solve_stationary(s, 1, 0.5, 400, 0, 0, &sol) == EWM_OK);
  CHECK(ewm_solution_converged(sol) == 1);
  CHECK(ewm_solution_action(sol) < 4 * pi - pi / 3 + 1e-3);
  REQUIRE(ewm_solution_size(sol) == 401);
  std::vector<double> r(401), phi(401);
  REQUIRE(ewm_solution_values(sol, r.data(), phi.data(), 401) == EWM_OK);
  CHECK(phi.front() == 0.0);
  CHECK(phi.back() == doctest::Approx(pi));

  ewm_state* ref = nullptr;
  REQUIRE(ewm_state_from_solution(sol, 0.5, &ref) == EWM_OK);
  ewm_state* st = nullptr;
  REQUIRE(ewm_state_perturb(ref, 1e-3, 0, 1, &st) == EWM_OK);
  const double E0 = ewm_state_energy(st), Q0 = ewm_state_charge(st);
  REQUIRE(ewm_state_run(st, 0.5, 0.4) == EWM_OK);
  CHECK(ewm_state_time(st) == doctest::Approx(0.5));
  CHECK(std::abs(ewm_state_energy(st) - E0) < 1e-6 * E0);
  CHECK(std::abs(ewm_state_charge(st) - Q0) < 1e-6 * Q0);
  CHECK(ewm_state_identity_residual(st, 0.5) < 1e-10);
  double d = -1, tau = 0;
  REQUIRE(ewm_state_orbit_distance(st, ref, &d, &tau) == EWM_OK);
  CHECK(d > 0.0);
  CHECK(d < 1e-2);
  CHECK(ewm_state_run(st, 0.5, 1.5) == EWM_INVALID_ARGUMENT);
  CHECK(ewm_state_step(st, 1.0) == EWM_INVALID_ARGUMENT);
  ewm_state_free(st);
  ewm_state_free(ref);
  ewm_solution_free(sol);
  ewm_surface_free(s);
}

TEST_CASE("config parsing and hashing") {
  ewm_config* cfg = nullptr;
  const char* sets[] = {"omega=0.5"};
  REQUIRE(ewm_config_parse(R"({"l": 1})", sets, 1, &cfg) == EWM_OK);
  char h1[17], h2[17];
  REQUIRE(ewm_config_hash(cfg, h1) == EWM_OK);
  ewm_config_free(cfg);
  REQUIRE(ewm_config_parse(R"({"l": 1, "omega": 0.5})", nullptr, 0, &cfg) == EWM_OK);
  REQUIRE(ewm_config_hash(cfg, h2) == EWM_OK);
  CHECK(std::string(h1) == std::string(h2));
  int code = -1;
  const char* summary = nullptr;
  REQUIRE(ewm_run_command(cfg, "no-such-command", &code, &summary) == EWM_OK);
  CHECK(code == 2);
  ewm_config_free(cfg);
  CHECK(ewm_config_parse(R"({"omgea": 1})", nullptr, 0, &cfg) == EWM_CONFIG);
  CHECK(std::string(ewm_last_error()).find("omgea") != std::string::npos);
}
