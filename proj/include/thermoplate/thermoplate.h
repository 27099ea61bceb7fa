#ifndef THERMOPLATE_H
#define THERMOPLATE_H

/* C interface to the thermoplate simulator. Handles are opaque; every call
 * returns a tp_status and leaves a message for tp_last_error() on failure. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(THERMOPLATE_BUILDING_LIBRARY)
#    define TP_API __declspec(dllexport)
#  else
#    define TP_API __declspec(dllimport)
#  endif
#else
#  define TP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tp_status {
  TP_OK = 0,
  TP_ERR_CONFIG = 1,
  TP_ERR_BLOWUP = 2,
  TP_ERR_VERIFICATION = 3,
  TP_ERR_USAGE = 4,
  TP_ERR_IO = 5,
  TP_ERR_INTERNAL = 6
} tp_status;

typedef enum tp_operator_kind {
  TP_PAPER_A = 0,
  TP_PAPER_A_INVERSE = 1,
  TP_GENERATOR_G = 2
} tp_operator_kind;

typedef struct tp_experiment tp_experiment;
typedef struct tp_state tp_state;

typedef struct tp_run_options {
  const char* output_dir; /* NULL: use the config's output.dir */
  unsigned threads;       /* 0 or 1: single thread */
  const char* format;     /* NULL, "csv" or "json" */
  int has_seed;
  uint64_t seed;
} tp_run_options;

typedef struct tp_energy {
  double kinetic, plate, thermal, potential, E, phi, psi, L;
} tp_energy;

/* Message of the last failed call on this thread; never NULL. */
TP_API const char* tp_last_error(void);
TP_API const char* tp_version(void);

TP_API tp_status tp_experiment_load(const char* path, tp_experiment** out);
TP_API tp_status tp_experiment_parse(const char* text, tp_experiment** out);
TP_API void tp_experiment_free(tp_experiment* experiment);
/* Canonical config text; *out is malloc'd and released with tp_string_free. */
TP_API tp_status tp_experiment_serialize(const tp_experiment* experiment, char** out);
TP_API void tp_string_free(char* text);

/* Commands. report_json, when not NULL, receives the run report (free with
 * tp_string_free). Failed checks return TP_ERR_VERIFICATION. */
TP_API tp_status tp_simulate(const tp_experiment* experiment, const tp_run_options* options, char** report_json);
TP_API tp_status tp_verify(const tp_experiment* experiment, const tp_run_options* options, char** report_json);
TP_API tp_status tp_attractor(const tp_experiment* experiment, const tp_run_options* options, char** report_json);
TP_API tp_status tp_decay_fit(const tp_experiment* experiment, const tp_run_options* options, char** report_json);
TP_API tp_status tp_operator_check(const tp_experiment* experiment, const tp_run_options* options, char** report_json);

/* 3x3 row-major matrix of one mode operator at time t with eigenvalue mu. */
TP_API tp_status tp_mode_operator(const tp_experiment* experiment, tp_operator_kind kind, double t,
                                  double mu, double out[9]);

/* States live on the experiment's domain. */
TP_API tp_status tp_state_zero(const tp_experiment* experiment, double t, tp_state** out);
TP_API tp_status tp_state_sample(const tp_experiment* experiment, double radius, uint64_t seed, tp_state** out);
TP_API void tp_state_free(tp_state* state);
/* Advance with the experiment's physics and nonlinearity to time t, step dt. */
TP_API tp_status tp_state_evolve(tp_state* state, double t, double dt);
TP_API tp_status tp_state_y_norm(const tp_state* state, double* out);
TP_API tp_status tp_state_energy(const tp_state* state, tp_energy* out);
/* Copies coefficients of component 0 (u), 1 (v) or 2 (theta); *count gets the
 * mode count. buffer may be NULL to query the count only. */
TP_API tp_status tp_state_coefficients(const tp_state* state, int component, double* buffer,
                                       size_t capacity, size_t* count);
TP_API tp_status tp_state_time(const tp_state* state, double* out);

#ifdef __cplusplus
}
#endif

#endif
