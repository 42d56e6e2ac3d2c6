/* ebdim — exceedance-based local-dimension estimation and regular-variation
 * diagnostics for dynamical systems.
 *
 * C API of the shared library. All functions return an ebdim_status; when a
 * call fails, ebdim_last_error() holds a detailed message for the calling
 * thread. Handles are opaque and freed with their _close function.
 */
#ifndef EBDIM_H
#define EBDIM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#ifndef EBDIM_API
#if defined(_WIN32)
#define EBDIM_API __declspec(dllexport)
#else
#define EBDIM_API __attribute__((visibility("default")))
#endif
#endif

typedef enum ebdim_status {
  EBDIM_OK = 0,
  EBDIM_ERROR_INVALID_ARGUMENT = 1,
  EBDIM_ERROR_RUNTIME = 2,
  EBDIM_ERROR_IO = 3,
  EBDIM_ERROR_BUFFER_TOO_SMALL = 4,
} ebdim_status;

EBDIM_API const char* ebdim_version(void);
EBDIM_API const char* ebdim_status_message(ebdim_status status);
EBDIM_API const char* ebdim_last_error(void);

/* --- system registry ----------------------------------------------------
 * Registered names: henon, cantor-shift, fat-cantor, solenoid, lorenz63,
 * lorenz96, henon-heiles. */
EBDIM_API int ebdim_system_count(void);
EBDIM_API ebdim_status ebdim_system_name(int index, char* buf, size_t buflen);

typedef struct ebdim_system ebdim_system;

EBDIM_API ebdim_status ebdim_system_open(const char* name, ebdim_system** out);
EBDIM_API void ebdim_system_close(ebdim_system* sys);
EBDIM_API int ebdim_system_dim(const ebdim_system* sys);
EBDIM_API int ebdim_system_is_flow(const ebdim_system* sys);
/* Override a named parameter (validated against the per-system range). */
EBDIM_API ebdim_status ebdim_system_set_param(ebdim_system* sys, const char* key,
                                              double value);

/* Discrete maps: state_out = f(state_in). cantor-shift acts on the embedded
 * coordinate (x -> 3x mod 1); fat-cantor is non-autonomous and takes the
 * 1-based step index via ebdim_system_step_n. Flows reject this call. */
EBDIM_API ebdim_status ebdim_system_step(const ebdim_system* sys,
                                         const double* state_in,
                                         double* state_out);
EBDIM_API ebdim_status ebdim_system_step_n(const ebdim_system* sys,
                                           const double* state_in,
                                           int64_t step_index, double* state_out);
/* Flows: deriv = rhs(state, t). Discrete maps reject this call. */
EBDIM_API ebdim_status ebdim_system_rhs(const ebdim_system* sys,
                                        const double* state, double t,
                                        double* deriv);

/* --- exact measure oracles ---------------------------------------------- */

/* Cantor ternary function (devil's staircase) on [0, 1]. */
EBDIM_API ebdim_status ebdim_cantor_ternary(double x, double* out);

/* Bernoulli(1/2,1/2) measure of a ball around the Cantor point given by
 * base-3 digits over {0,2}. radius >= 1 saturates at 1; radius below
 * 3^-depth is rejected. */
EBDIM_API ebdim_status ebdim_cantor_ball_measure(const uint8_t* digits,
                                                 size_t depth, double radius,
                                                 double* mu);
/* mu(B_{b r}) / mu(B_r), 0 < b <= 1. */
EBDIM_API ebdim_status ebdim_cantor_ratio(const uint8_t* digits, size_t depth,
                                          double radius, double b, double* out);

/* Solenoid attractor dimension 1 - log 2 / log a. */
EBDIM_API ebdim_status ebdim_solenoid_dimension(double contraction, double* out);

/* Section points of all 2^depth branches (depth <= 30). xy receives
 * interleaved x,y pairs; cap_points is the capacity in points. */
EBDIM_API ebdim_status ebdim_solenoid_branch_points(int depth, double contraction,
                                                    double section_angle,
                                                    const double v0[2], double* xy,
                                                    size_t cap_points,
                                                    size_t* n_points);

/* Branch-comb approximation of the ball measure around branch
 * center_branch (bit i-1 of the mask holds the i-th backward turn). */
EBDIM_API ebdim_status ebdim_solenoid_ball_measure(int depth, double contraction,
                                                   double section_angle,
                                                   uint32_t center_branch,
                                                   const double v0[2],
                                                   double radius, int raw_form,
                                                   double* mu);

/* --- estimators ---------------------------------------------------------- */

/* Exponential fit to the excesses of `series` over its q-quantile:
 * value = 1 / mean(excess), stderr = value / sqrt(n). */
EBDIM_API ebdim_status ebdim_pot_fit(const double* series, size_t n, double q,
                                     double* value, double* stderr_out);

/* Exceedance-based dimension from ball distances with the threshold at the
 * ball radius (all points are excesses of -log d). */
EBDIM_API ebdim_status ebdim_ebd_at_radius(const double* distances, size_t n,
                                           double radius, double* value);

/* Correlation-sum dimension around the reference the distances were taken
 * from; flagged is set when no linear window of R^2 >= 0.99 exists. */
EBDIM_API ebdim_status ebdim_correlation_dimension(const double* distances,
                                                   size_t n, double* value,
                                                   int* flagged);

/* Inter-exceedance extremal-index estimator; indices are strictly increasing
 * exceedance positions in a series of length series_len sampled with the
 * quantile q used to pick them. */
EBDIM_API ebdim_status ebdim_suveges_theta(const int64_t* indices,
                                           size_t n_indices, int64_t series_len,
                                           double q, double* theta, int* flagged);

EBDIM_API ebdim_status ebdim_mean_cluster_time(double theta, double dt,
                                               double* out);

/* --- experiments ---------------------------------------------------------
 * config_json is an ExperimentConfig document (see README for the schema);
 * outputs (CSV/JSON tables plus manifest.json) land under out_dir. Reruns
 * with an identical config produce byte-identical tables. */
EBDIM_API ebdim_status ebdim_run_experiment(const char* config_json,
                                            const char* out_dir);

/* Progress callback variant; may be invoked from worker threads. */
typedef void (*ebdim_progress_fn)(const char* stage, double fraction, void* user);
EBDIM_API ebdim_status ebdim_run_experiment_cb(const char* config_json,
                                               const char* out_dir,
                                               ebdim_progress_fn cb, void* user);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* EBDIM_H */
