#ifndef RADIALWAVE_H
#define RADIALWAVE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum RwStatus {
  RwOk = 0,
  RwErrDomain = 1,
  RwErrInterpolation = 2,
  RwErrConvergence = 3,
  RwErrSingular = 4,
  RwErrRoot = 5,
  RwErrResolution = 6,
  RwErrTruncation = 7,
  RwErrTail = 8,
  RwErrCfl = 9,
  RwErrBoundaryTouch = 10,
  RwErrConfig = 11,
  RwErrIo = 12,
  /**
   * A required pointer argument was null.
   */
  RwErrNullArgument = 13,
  /**
   * A string argument was not valid UTF-8.
   */
  RwErrUtf8 = 14,
  /**
   * Diagnostics ran but at least one failed (scenario runner only).
   */
  RwDiagnosticFailure = 15,
  /**
   * An internal panic was caught at the boundary.
   */
  RwPanic = 16,
} RwStatus;

/**
 * Opaque density-model handle.
 */
typedef struct RwModel RwModel;

/**
 * Opaque wave-state handle (a snapshot u(., t), u_t(., t)).
 */
typedef struct RwWaveState RwWaveState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the calling thread's most recent error message into `buf`
 * (NUL-terminated, truncated to `cap` bytes). Returns the full message
 * length in bytes, excluding the terminator.
 *
 * # Safety
 * `buf` must point to `cap` writable bytes, or be null (length query).
 */
uintptr_t rw_last_error(char *buf, uintptr_t cap);

/**
 * Create a Jacobi density model A(r) = (2 sinh(s r)/s)^(2a+1) (2 cosh(s r))^(2b+1).
 *
 * # Safety
 * `out` must be a valid pointer; on `RW_OK` it receives a handle that
 * must be released with `rw_model_free`.
 */
enum RwStatus rw_model_jacobi(double alpha, double beta, double scale, struct RwModel **out);

/**
 * Load a model from a catalog file (`model = jacobi` / `model = table`).
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` as in `rw_model_jacobi`.
 */
enum RwStatus rw_model_from_catalog(const char *path, struct RwModel **out);

/**
 * Release a model handle. Null is a no-op.
 *
 * # Safety
 * `model` must be a handle from a constructor, released at most once.
 */
void rw_model_free(struct RwModel *model);

/**
 * Half the horosphere mean curvature of the model (NaN for null).
 *
 * # Safety
 * `model` must be a live handle or null.
 */
double rw_model_rho(const struct RwModel *model);

/**
 * Evaluate the density: writes A(r) and A'(r)/A(r).
 *
 * # Safety
 * `model` must be a live handle; `a_out` and `logderiv_out` valid pointers.
 */
enum RwStatus rw_eval_density(const struct RwModel *model,
                              double r,
                              double *a_out,
                              double *logderiv_out);

/**
 * Evaluate the radial eigenfunction phi_lambda(r) (real for real lambda).
 *
 * # Safety
 * `model` must be a live handle; `out` a valid pointer.
 */
enum RwStatus rw_eigenfunction(const struct RwModel *model, double lambda, double r, double *out);

/**
 * Evaluate the Plancherel density |c(lambda)|^-2.
 *
 * # Safety
 * `model` must be a live handle; `out` a valid pointer.
 */
enum RwStatus rw_plancherel_density(const struct RwModel *model, double lambda, double *out);

/**
 * Solve the shifted wave equation with mollifier Cauchy data
 * f = bump(radius, amplitude), g = 0, by the spectral solver, and return
 * the snapshot at time t.
 *
 * # Safety
 * `model` must be a live handle; `out` receives a handle to release with
 * `rw_wave_state_free`.
 */
enum RwStatus rw_propagate_bump(const struct RwModel *model,
                                double radius,
                                double amplitude,
                                double t,
                                struct RwWaveState **out);

/**
 * Release a wave-state handle. Null is a no-op.
 *
 * # Safety
 * `state` must be a handle from `rw_propagate_bump`, released at most once.
 */
void rw_wave_state_free(struct RwWaveState *state);

/**
 * Snapshot time of a wave state (NaN for null).
 *
 * # Safety
 * `state` must be a live handle or null.
 */
double rw_wave_state_time(const struct RwWaveState *state);

/**
 * Sample u and u_t of a snapshot at radius r (interpolated; zero beyond
 * the stored grid).
 *
 * # Safety
 * `state` must be a live handle; the four output pointers must be valid.
 */
enum RwStatus rw_wave_state_sample(const struct RwWaveState *state,
                                   double r,
                                   double *re_u,
                                   double *im_u,
                                   double *re_ut,
                                   double *im_ut);

/**
 * Run a scenario config end to end (the `radialwave run` semantics).
 * Returns `RW_OK` when every asserted diagnostic passes,
 * `RW_DIAGNOSTIC_FAILURE` when at least one fails, or an error code.
 * `out_dir` overrides the config's output directory when non-null.
 *
 * # Safety
 * `config_path` must be NUL-terminated; `out_dir` NUL-terminated or null.
 */
enum RwStatus rw_run_scenario(const char *config_path, const char *out_dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RADIALWAVE_H */
