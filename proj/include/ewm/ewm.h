#ifndef EWM_EWM_H
#define EWM_EWM_H

#include <stddef.h>
#include <stdint.h>

#if defined(EWM_BUILDING_LIBRARY)
#define EWM_API __attribute__((visibility("default")))
#else
#define EWM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ewm_status {
  EWM_OK = 0,
  EWM_INVALID_ARGUMENT = 1,
  EWM_DOMAIN = 2,
  EWM_NOT_CONVERGED = 3,
  EWM_EVOLUTION_ABORTED = 4,
  EWM_IO = 5,
  EWM_CONFIG = 6,
  EWM_INTERNAL = 7
} ewm_status;

typedef struct ewm_surface ewm_surface;
typedef struct ewm_solution ewm_solution;
typedef struct ewm_state ewm_state;
typedef struct ewm_config ewm_config;

/* Message of the last failed call on this thread ("" if none). */
EWM_API const char* ewm_last_error(void);
EWM_API const char* ewm_status_string(ewm_status status);
EWM_API const char* ewm_version(void);

/* Surfaces */
EWM_API ewm_status ewm_surface_round(ewm_surface** out);
EWM_API ewm_status ewm_surface_bumpy(double epsilon, ewm_surface** out);
EWM_API ewm_status ewm_surface_flat(double R, ewm_surface** out);
EWM_API ewm_status ewm_surface_from_csv(const char* path, ewm_surface** out);
EWM_API void ewm_surface_free(ewm_surface* s);
EWM_API double ewm_surface_extent(const ewm_surface* s);
/* jet = {f, f', f'', k} */
EWM_API ewm_status ewm_surface_eval(const ewm_surface* s, double r, double jet[4]);

/* Geometry: out = {d, alpha, beta} */
EWM_API ewm_status ewm_geodesic_distance(const ewm_surface* s, double r, double rp, double theta, double out[3]);
EWM_API ewm_status ewm_rhs_coefficient(const ewm_surface* s, int l, double r, double* out);

/* Stationary maps (round target) */
EWM_API ewm_status ewm_solve_stationary(const ewm_surface* s, int l, double omega, int N, double tol, int max_iter,
                                        ewm_solution** out);
EWM_API void ewm_solution_free(ewm_solution* sol);
EWM_API int ewm_solution_converged(const ewm_solution* sol);
EWM_API double ewm_solution_action(const ewm_solution* sol);
EWM_API double ewm_solution_residual(const ewm_solution* sol);
EWM_API size_t ewm_solution_size(const ewm_solution* sol);
/* Copies min(n, size) values of r and phi; either pointer may be NULL. */
EWM_API ewm_status ewm_solution_values(const ewm_solution* sol, double* r, double* phi, size_t n);

/* Evolution */
EWM_API ewm_status ewm_state_from_solution(const ewm_solution* sol, double omega, ewm_state** out);
EWM_API ewm_status ewm_state_perturb(const ewm_state* s, double delta, int shape, uint64_t seed, ewm_state** out);
EWM_API void ewm_state_free(ewm_state* s);
EWM_API double ewm_state_time(const ewm_state* s);
EWM_API ewm_status ewm_state_step(ewm_state* s, double dt);
/* Evolves in place to t + T; aborted runs return EWM_EVOLUTION_ABORTED and keep the last good state. */
EWM_API ewm_status ewm_state_run(ewm_state* s, double T, double cfl);
EWM_API double ewm_state_energy(const ewm_state* s);
EWM_API double ewm_state_charge(const ewm_state* s);
EWM_API double ewm_state_identity_residual(const ewm_state* s, double omega);
/* Distance to the rotation orbit of `reference`; tau may be NULL. */
EWM_API ewm_status ewm_state_orbit_distance(const ewm_state* s, const ewm_state* reference, double* d, double* tau);

/* Configuration and subcommands */
EWM_API ewm_status ewm_config_parse(const char* json_text, const char* const* overrides, size_t n_overrides,
                                    ewm_config** out);
EWM_API ewm_status ewm_config_load(const char* path, const char* const* overrides, size_t n_overrides,
                                   ewm_config** out);
EWM_API void ewm_config_free(ewm_config* cfg);
/* 16 hex digits plus terminator. */
EWM_API ewm_status ewm_config_hash(const ewm_config* cfg, char out[17]);
/* Runs a subcommand; *exit_code follows the CLI convention. The summary text stays valid until the next call. */
EWM_API ewm_status ewm_run_command(const ewm_config* cfg, const char* subcommand, int* exit_code,
                                   const char** summary);

#ifdef __cplusplus
}
#endif

#endif
