#ifndef PEXSTAB_H
#define PEXSTAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PexStatus {
  PEX_STATUS_OK = 0,
  PEX_STATUS_NULL_POINTER = 1,
  PEX_STATUS_INVALID_ARGUMENT = 2,
  PEX_STATUS_INVALID_SIGNAL = 3,
  PEX_STATUS_DIMENSION_MISMATCH = 4,
  PEX_STATUS_NOT_DISSIPATIVE = 5,
  PEX_STATUS_UNCONTROLLABLE = 6,
  PEX_STATUS_INFEASIBLE = 7,
  PEX_STATUS_NUMERICAL = 8,
  PEX_STATUS_BUFFER_TOO_SMALL = 9,
  PEX_STATUS_PANIC = 10,
} PexStatus;

/**
 * Piecewise-constant damping signal.
 */
typedef struct PexSignal PexSignal;

/**
 * Dissipative pair `(A, B)`.
 */
typedef struct PexSystem PexSystem;

/**
 * Sampled simulation result.
 */
typedef struct PexTrajectory PexTrajectory;

typedef struct PexPeReport {
  bool holds;
  double worst_window_start;
  double worst_window_mass;
} PexPeReport;

typedef struct PexCounterexample {
  double b_prime;
  double mu;
  double period;
  bool pe_ok;
  double max_overlap;
  double energy;
  double energy_drift;
  bool inert;
} PexCounterexample;

typedef struct PexCertificate {
  double q;
  double theta;
  double m;
  double gamma;
} PexCertificate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *pex_version(void);

/**
 * Copies the last error message of this thread into `buf` (truncated, NUL-terminated) and
 * returns the full message length excluding the terminator.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t pex_last_error_message(char *buf, size_t len);

/**
 * Signal with `values[i]` on `[breakpoints[i-1], breakpoints[i])` (first cell from 0) and
 * `tail` afterwards.
 *
 * # Safety
 * `breakpoints` and `values` must be valid for `n` reads; `out` must be writable.
 */
enum PexStatus pex_signal_piecewise(const double *breakpoints,
                                    const double *values,
                                    size_t n,
                                    double tail,
                                    struct PexSignal **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum PexStatus pex_signal_constant(double level, struct PexSignal **out);

/**
 * Unit pulses of half-width `halfwidth` centred at multiples of `period`, up to `horizon`.
 *
 * # Safety
 * `out` must be writable.
 */
enum PexStatus pex_signal_periodic_gate(double period,
                                        double halfwidth,
                                        double horizon,
                                        struct PexSignal **out);

/**
 * # Safety
 * `sig` must come from a `pex_signal_*` constructor and not be used afterwards.
 */
void pex_signal_free(struct PexSignal *sig);

/**
 * # Safety
 * `sig` must be a live handle; `out` must be writable.
 */
enum PexStatus pex_signal_eval(const struct PexSignal *sig, double t, double *out);

/**
 * `int_a^b alpha`.
 *
 * # Safety
 * `sig` must be a live handle; `out` must be writable.
 */
enum PexStatus pex_signal_integral(const struct PexSignal *sig, double a, double b, double *out);

/**
 * Exact check of `int_t^{t+T} alpha >= mu` for all `t` in `[0, horizon - T]`.
 *
 * # Safety
 * `sig` must be a live handle; `out` must be writable.
 */
enum PexStatus pex_signal_pe_check(const struct PexSignal *sig,
                                   double window,
                                   double mu,
                                   double horizon,
                                   struct PexPeReport *out);

/**
 * System from row-major `a` (`n x n`) and `b` (`n x r`).
 *
 * # Safety
 * `a` must be valid for `n*n` reads, `b` for `n*r`; `out` must be writable.
 */
enum PexStatus pex_system_new(const double *a,
                              size_t n,
                              const double *b,
                              size_t r,
                              struct PexSystem **out);

/**
 * String truncation on the unit interval with uniform damping `d0`.
 *
 * # Safety
 * `out` must be writable.
 */
enum PexStatus pex_system_wave_uniform(size_t n_modes, double d0, struct PexSystem **out);

/**
 * String truncation with damping on `(a, b)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum PexStatus pex_system_wave_localized(size_t n_modes,
                                         double a,
                                         double b,
                                         struct PexSystem **out);

/**
 * Schrödinger truncation with damping on `(a, b)`; state dimension `2 n_modes`.
 *
 * # Safety
 * `out` must be writable.
 */
enum PexStatus pex_system_schrodinger(size_t n_modes, double a, double b, struct PexSystem **out);

/**
 * State dimension, or 0 for a null handle.
 *
 * # Safety
 * `sys` must be null or a live handle.
 */
size_t pex_system_dim(const struct PexSystem *sys);

/**
 * # Safety
 * `sys` must be a live handle; `out` must be writable.
 */
enum PexStatus pex_system_b_norm(const struct PexSystem *sys, double *out);

/**
 * # Safety
 * `sys` must be a live handle; `out` must be writable.
 */
enum PexStatus pex_system_kalman_index(const struct PexSystem *sys, size_t *out);

/**
 * # Safety
 * `sys` must come from a `pex_system_*` constructor and not be used afterwards.
 */
void pex_system_free(struct PexSystem *sys);

/**
 * Exact simulation sampled every `dt_out` (plus signal breakpoints) on `[0, horizon]`.
 *
 * # Safety
 * Handles must be live; `z0` must be valid for `n` reads; `out` must be writable.
 */
enum PexStatus pex_simulate(const struct PexSystem *sys,
                            const struct PexSignal *sig,
                            const double *z0,
                            size_t n,
                            double horizon,
                            double dt_out,
                            struct PexTrajectory **out);

/**
 * Number of samples, or 0 for a null handle.
 *
 * # Safety
 * `traj` must be null or a live handle.
 */
size_t pex_trajectory_len(const struct PexTrajectory *traj);

/**
 * Copies the sample times into `buf` (needs `pex_trajectory_len` slots).
 *
 * # Safety
 * `traj` must be live; `buf` must be valid for `len` writes.
 */
enum PexStatus pex_trajectory_times(const struct PexTrajectory *traj, double *buf, size_t len);

/**
 * Copies `V = |z|^2 / 2` at each sample into `buf`.
 *
 * # Safety
 * `traj` must be live; `buf` must be valid for `len` writes.
 */
enum PexStatus pex_trajectory_energies(const struct PexTrajectory *traj, double *buf, size_t len);

/**
 * Copies the final state into `buf` (needs the system dimension).
 *
 * # Safety
 * `traj` must be live; `buf` must be valid for `len` writes.
 */
enum PexStatus pex_trajectory_final_state(const struct PexTrajectory *traj,
                                          double *buf,
                                          size_t len);

/**
 * # Safety
 * `traj` must come from [`pex_simulate`] and not be used afterwards.
 */
void pex_trajectory_free(struct PexTrajectory *traj);

/**
 * Traveling-wave solution on which damping localized in `(a, b)` never acts.
 *
 * # Safety
 * `out` must be writable.
 */
enum PexStatus pex_counterexample(double a,
                                  double b,
                                  size_t periods,
                                  struct PexCounterexample *out);

/**
 * Lower bound on the PE-class observability constant of the uniformly damped string.
 *
 * # Safety
 * `out` must be writable.
 */
enum PexStatus pex_wave_pe_lower_bound(double t,
                                       double mu,
                                       double lambda_min,
                                       double d0,
                                       double *out);

/**
 * Decay certificate `(q, theta, M, gamma)` from an observability constant.
 *
 * # Safety
 * `out` must be writable.
 */
enum PexStatus pex_certificate(double c, double theta, double b_norm, struct PexCertificate *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PEXSTAB_H */
