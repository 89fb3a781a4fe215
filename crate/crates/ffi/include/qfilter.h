#ifndef QFILTER_H
#define QFILTER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes.
 */
typedef enum QfStatus {
  QF_STATUS_OK = 0,
  QF_STATUS_NULL_POINTER = 1,
  QF_STATUS_INVALID_ARGUMENT = 2,
  QF_STATUS_INVALID_STATE = 3,
  QF_STATUS_NUMERICAL = 4,
  QF_STATUS_OUT_OF_RANGE = 5,
  QF_STATUS_PANIC = 6,
} QfStatus;

/**
 * Opaque density matrix (dimension 2 or 4).
 */
typedef struct QfDensity QfDensity;

/**
 * Opaque single-realization result.
 */
typedef struct QfTrajectory QfTrajectory;

/**
 * Point-contact parameters (reduced units).
 */
typedef struct QfQpcParams {
  double transparency;
  double delta_transparency;
  double bias_voltage;
  double temperature;
  /**
   * Resistance quantum; zero selects the reduced-unit default `2 pi`.
   */
  double klitzing_constant;
} QfQpcParams;

typedef struct QfDetectorModel {
  double kappa;
  double delta_current;
  double noise_floor;
  double mean_current;
  /**
   * `sqrt(8 kappa)`.
   */
  double record_gain;
} QfDetectorModel;

/**
 * Scenario for [`qf_trajectory_run`].
 */
typedef struct QfSimConfig {
  double omega;
  double epsilon;
  double kappa;
  /**
   * Horizon in Rabi periods.
   */
  double periods;
  size_t steps_per_period;
  /**
   * Output samples after `t = 0`.
   */
  size_t output_points;
  uint64_t seed;
} QfSimConfig;

/**
 * One output row. Fidelity metrics are raw `1 - F`; divergent entropies
 * are `+inf`.
 */
typedef struct QfTrajectoryRow {
  double t;
  double p_l_real;
  double p_l_est;
  double p_l_ideal;
  double c_fid;
  double b_fid;
  double c_re;
  double b_re;
  double e_re;
} QfTrajectoryRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len` bytes). Returns the full message length, or 0 if none.
 */
size_t qf_last_error(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *qf_version(void);

/**
 * Validates and wraps a `dim x dim` row-major matrix.
 */
enum QfStatus qf_density_new(const double *re,
                             const double *im,
                             size_t dim,
                             struct QfDensity **out);

void qf_density_free(struct QfDensity *rho);

size_t qf_density_dim(const struct QfDensity *rho);

/**
 * Uhlmann fidelity in `[0, 1]`.
 */
enum QfStatus qf_fidelity(const struct QfDensity *a, const struct QfDensity *b, double *out);

/**
 * `S(sigma || rho)` in nats; writes `+inf` on a support violation.
 */
enum QfStatus qf_relative_entropy(const struct QfDensity *sigma,
                                  const struct QfDensity *rho,
                                  double *out);

enum QfStatus qf_entropy(const struct QfDensity *rho, double *out);

enum QfStatus qf_purity(const struct QfDensity *rho, double *out);

enum QfStatus qf_detector_model(struct QfQpcParams params, struct QfDetectorModel *out);

/**
 * Runs one realization from the left-dot state with the estimate started at
 * the maximally mixed state.
 */
enum QfStatus qf_trajectory_run(const struct QfSimConfig *cfg, struct QfTrajectory **out);

size_t qf_trajectory_len(const struct QfTrajectory *traj);

enum QfStatus qf_trajectory_row(const struct QfTrajectory *traj,
                                size_t index,
                                struct QfTrajectoryRow *out);

void qf_trajectory_free(struct QfTrajectory *traj);

/**
 * Discord lower bound of a 4x4 system ⊗ apparatus state; the minimizing
 * basis angles are written to `theta`/`phi` when non-NULL.
 */
enum QfStatus qf_discord_lower_bound(const struct QfDensity *rho,
                                     size_t resolution,
                                     double *discord,
                                     double *theta,
                                     double *phi);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* QFILTER_H */
