#include "ewm/ewm.h"

#include <algorithm>
#include <cstring>
#include <string>
#include <utility>

#include "ewm/config.hpp"
#include "ewm/diagnostics.hpp"
#include "ewm/driver.hpp"
#include "ewm/error.hpp"
#include "ewm/evolution.hpp"
#include "ewm/geodesic.hpp"
#include "ewm/regularity.hpp"
#include "ewm/stationary.hpp"

struct ewm_surface {
  ewm::SurfaceProfile p;
};
struct ewm_solution {
  ewm::StationarySolution s;
};
struct ewm_state {
  ewm::FieldState s;
};
struct ewm_config {
  ewm::RunConfig c;
};

namespace {

thread_local std::string last_error;
thread_local std::string last_summary;

ewm_status to_status(ewm::ErrorCode c) {
  switch (c) {
    case ewm::ErrorCode::ok: return EWM_OK;
    case ewm::ErrorCode::invalid_argument: return EWM_INVALID_ARGUMENT;
    case ewm::ErrorCode::domain: return EWM_DOMAIN;
    case ewm::ErrorCode::not_converged: return EWM_NOT_CONVERGED;
    case ewm::ErrorCode::evolution_aborted: return EWM_EVOLUTION_ABORTED;
    case ewm::ErrorCode::io: return EWM_IO;
    case ewm::ErrorCode::config: return EWM_CONFIG;
  }
  return EWM_INTERNAL;
}

template <class F>
ewm_status guarded(F&& f) {
  try {
    last_error.clear();
    return f();
  } catch (const ewm::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::exception& e) {
    last_error = e.what();
    return EWM_INTERNAL;
  } catch (...) {
    last_error = "unknown exception";
    return EWM_INTERNAL;
  }
}

ewm_status null_arg(const char* what) {
  last_error = std::string("null argument: ") + what;
  return EWM_INVALID_ARGUMENT;
}

std::vector<std::string> collect(const char* const* items, size_t n) {
  std::vector<std::string> v;
  for (size_t i = 0; i < n; ++i)
    if (items[i]) v.emplace_back(items[i]);
  return v;
}

template <class Handle, class Value>
ewm_status emit(Handle** out, Value&& v) {
  *out = new Handle{std::forward<Value>(v)};
  return EWM_OK;
}

}  // namespace

extern "C" {

const char* ewm_last_error(void) { return last_error.c_str(); }

const char* ewm_status_string(ewm_status status) {
  switch (status) {
    case EWM_OK: return "ok";
    case EWM_INVALID_ARGUMENT: return "invalid argument";
    case EWM_DOMAIN: return "domain error";
    case EWM_NOT_CONVERGED: return "not converged";
    case EWM_EVOLUTION_ABORTED: return "evolution aborted";
    case EWM_IO: return "i/o error";
    case EWM_CONFIG: return "configuration error";
    case EWM_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* ewm_version(void) { return "1.0.0"; }

ewm_status ewm_surface_round(ewm_surface** out) {
  if (!out) return null_arg("out");
  return guarded([&] { return emit(out, ewm::SurfaceProfile::round()); });
}

ewm_status ewm_surface_bumpy(double epsilon, ewm_surface** out) {
  if (!out) return null_arg("out");
  return guarded([&] { return emit(out, ewm::SurfaceProfile::bumpy(epsilon)); });
}

ewm_status ewm_surface_flat(double R, ewm_surface** out) {
  if (!out) return null_arg("out");
  return guarded([&] { return emit(out, ewm::SurfaceProfile::flat(R)); });
}

ewm_status ewm_surface_from_csv(const char* path, ewm_surface** out) {
  if (!out || !path) return null_arg("path/out");
  return guarded([&] { return emit(out, ewm::SurfaceProfile::from_csv(path)); });
}

void ewm_surface_free(ewm_surface* s) { delete s; }

double ewm_surface_extent(const ewm_surface* s) { return s ? s->p.R() : 0.0; }

ewm_status ewm_surface_eval(const ewm_surface* s, double r, double jet[4]) {
  if (!s || !jet) return null_arg("surface/jet");
  return guarded([&] {
    const auto j = s->p.eval(r);
    jet[0] = j.f, jet[1] = j.fp, jet[2] = j.fpp, jet[3] = j.k;
    return EWM_OK;
  });
}

ewm_status ewm_geodesic_distance(const ewm_surface* s, double r, double rp, double theta, double out[3]) {
  if (!s || !out) return null_arg("surface/out");
  return guarded([&] {
    const auto t = ewm::geodesic_distance(s->p, r, rp, theta);
    out[0] = t.d, out[1] = t.alpha, out[2] = t.beta;
    return EWM_OK;
  });
}

ewm_status ewm_rhs_coefficient(const ewm_surface* s, int l, double r, double* out) {
  if (!s || !out) return null_arg("surface/out");
  return guarded([&] {
    *out = ewm::rhs_coefficient(s->p, l, r);
    return EWM_OK;
  });
}

ewm_status ewm_solve_stationary(const ewm_surface* s, int l, double omega, int N, double tol, int max_iter,
                                ewm_solution** out) {
  if (!s || !out) return null_arg("surface/out");
  return guarded([&] {
    ewm::StationaryOptions o;
    if (tol > 0) o.tol = tol;
    if (max_iter > 0) o.max_iter = max_iter;
    auto sol = ewm::solve_stationary(s->p, ewm::TargetProfile::round(), l, omega, N, nullptr, o);
    const bool ok = sol.converged;
    emit(out, std::move(sol));
    if (!ok) last_error = "stationary solver did not reach the tolerance";
    return ok ? EWM_OK : EWM_NOT_CONVERGED;
  });
}

void ewm_solution_free(ewm_solution* sol) { delete sol; }
int ewm_solution_converged(const ewm_solution* sol) { return sol && sol->s.converged ? 1 : 0; }
double ewm_solution_action(const ewm_solution* sol) { return sol ? sol->s.action : 0.0; }
double ewm_solution_residual(const ewm_solution* sol) { return sol ? sol->s.residual_norm : 0.0; }
size_t ewm_solution_size(const ewm_solution* sol) { return sol ? sol->s.phi.size() : 0; }

ewm_status ewm_solution_values(const ewm_solution* sol, double* r, double* phi, size_t n) {
  if (!sol) return null_arg("solution");
  const size_t m = std::min(n, sol->s.phi.size());
  for (size_t i = 0; i < m; ++i) {
    if (r) r[i] = sol->s.grid.r(static_cast<int>(i));
    if (phi) phi[i] = sol->s.phi[i];
  }
  return EWM_OK;
}

ewm_status ewm_state_from_solution(const ewm_solution* sol, double omega, ewm_state** out) {
  if (!sol || !out) return null_arg("solution/out");
  return guarded([&] { return emit(out, ewm::state_from_stationary(sol->s, omega)); });
}

ewm_status ewm_state_perturb(const ewm_state* s, double delta, int shape, uint64_t seed, ewm_state** out) {
  if (!s || !out) return null_arg("state/out");
  return guarded([&] { return emit(out, ewm::perturb_state(s->s, delta, shape, seed)); });
}

void ewm_state_free(ewm_state* s) { delete s; }
double ewm_state_time(const ewm_state* s) { return s ? s->s.t : 0.0; }

ewm_status ewm_state_step(ewm_state* s, double dt) {
  if (!s) return null_arg("state");
  return guarded([&] {
    ewm::step(s->s, dt);
    return EWM_OK;
  });
}

ewm_status ewm_state_run(ewm_state* s, double T, double cfl) {
  if (!s) return null_arg("state");
  return guarded([&] {
    ewm::RunOptions o;
    o.T = T;
    o.cfl = cfl;
    o.record_every = 1 << 30;
    auto res = ewm::run(s->s, o);
    s->s = std::move(res.final_state);
    if (res.aborted) {
      last_error = res.failure;
      return EWM_EVOLUTION_ABORTED;
    }
    return EWM_OK;
  });
}

double ewm_state_energy(const ewm_state* s) { return s ? ewm::energy(s->s) : 0.0; }
double ewm_state_charge(const ewm_state* s) { return s ? ewm::charge(s->s) : 0.0; }
double ewm_state_identity_residual(const ewm_state* s, double omega) {
  return s ? ewm::energy_identity_residual(s->s, omega) : 0.0;
}

ewm_status ewm_state_orbit_distance(const ewm_state* s, const ewm_state* reference, double* d, double* tau) {
  if (!s || !reference || !d) return null_arg("state/reference/d");
  return guarded([&] {
    const auto o = ewm::distance_to_orbit(s->s, reference->s);
    *d = o.d;
    if (tau) *tau = o.tau;
    return EWM_OK;
  });
}

ewm_status ewm_config_parse(const char* json_text, const char* const* overrides, size_t n_overrides, ewm_config** out) {
  if (!json_text || !out || (n_overrides && !overrides)) return null_arg("json/overrides/out");
  return guarded([&] { return emit(out, ewm::parse_config(json_text, collect(overrides, n_overrides))); });
}

ewm_status ewm_config_load(const char* path, const char* const* overrides, size_t n_overrides, ewm_config** out) {
  if (!path || !out || (n_overrides && !overrides)) return null_arg("path/overrides/out");
  return guarded([&] { return emit(out, ewm::load_config(path, collect(overrides, n_overrides))); });
}

void ewm_config_free(ewm_config* cfg) { delete cfg; }

ewm_status ewm_config_hash(const ewm_config* cfg, char out[17]) {
  if (!cfg || !out) return null_arg("config/out");
  return guarded([&] {
    const auto h = cfg->c.hash();
    std::memcpy(out, h.c_str(), 17);
    return EWM_OK;
  });
}

ewm_status ewm_run_command(const ewm_config* cfg, const char* subcommand, int* exit_code, const char** summary) {
  if (!cfg || !subcommand || !exit_code) return null_arg("config/subcommand/exit_code");
  return guarded([&] {
    auto res = ewm::run_command(cfg->c, subcommand);
    *exit_code = res.exit_code;
    last_summary = std::move(res.summary);
    if (summary) *summary = last_summary.c_str();
    return EWM_OK;
  });
}

}  // extern "C"
