#ifndef CONTACT_MECH_H
#define CONTACT_MECH_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum CmStatus {
  CM_STATUS_OK = 0,
  CM_STATUS_NULL_POINTER = 1,
  CM_STATUS_INVALID_ARGUMENT = 2,
  CM_STATUS_PARSE = 3,
  CM_STATUS_DOMAIN = 4,
  CM_STATUS_DIMENSION_MISMATCH = 5,
  CM_STATUS_SINGULAR_HESSIAN = 6,
  CM_STATUS_NO_CRITICAL_FIBER = 7,
  CM_STATUS_CONSTRAINT = 8,
  /**
   * A verification check failed; its report is still returned.
   */
  CM_STATUS_CHECK_FAILED = 9,
  /**
   * Integration hit a non-finite state; the partial trajectory is still returned.
   */
  CM_STATUS_BLOW_UP = 10,
  CM_STATUS_PANIC = 99,
} CmStatus;

typedef enum CmMapKind {
  CM_MAP_KIND_BETA_C = 0,
  CM_MAP_KIND_ALPHA_C = 1,
  CM_MAP_KIND_PSI_C = 2,
  CM_MAP_KIND_ALPHA0 = 3,
  CM_MAP_KIND_BETA0 = 4,
  CM_MAP_KIND_ALPHA = 5,
  CM_MAP_KIND_BETA = 6,
  CM_MAP_KIND_PSI = 7,
  CM_MAP_KIND_KAPPA = 8,
} CmMapKind;

typedef enum CmSuite {
  CM_SUITE_MAPS = 0,
  CM_SUITE_LEGENDRIAN = 1,
  CM_SUITE_DYNAMICS = 2,
  CM_SUITE_THERMO = 3,
  CM_SUITE_ALL = 4,
} CmSuite;

typedef struct CmHamiltonian CmHamiltonian;

typedef struct CmLagrangian CmLagrangian;

typedef struct CmMap CmMap;

typedef struct CmTrajectory CmTrajectory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread; empty if none. Valid until the
 * next failing call on the same thread.
 */
const char *cm_last_error(void);

/**
 * Library version as a static string.
 */
const char *cm_version(void);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void cm_string_free(char *s);

/**
 * Parses a contact Hamiltonian H(q, p, z) with `n` degrees of freedom.
 * Coordinates are `q, p, z` for n = 1 and `q1..qn, p1..pn, z` otherwise;
 * `count` named constants are substituted at parse time.
 *
 * # Safety
 * Pointers must be valid for the given counts; strings NUL-terminated.
 */
enum CmStatus cm_hamiltonian_new(size_t n,
                                 const char *expr,
                                 const char *const *names,
                                 const double *values,
                                 size_t count,
                                 struct CmHamiltonian **out);

/**
 * # Safety
 * `h` must come from [`cm_hamiltonian_new`] or be null.
 */
void cm_hamiltonian_free(struct CmHamiltonian *h);

/**
 * State dimension 2n + 1, or 0 for a null handle.
 *
 * # Safety
 * `h` must be a live handle or null.
 */
size_t cm_hamiltonian_dim(const struct CmHamiltonian *h);

/**
 * # Safety
 * `x` must hold `len` values; `out` must be writable.
 */
enum CmStatus cm_hamiltonian_value(const struct CmHamiltonian *h,
                                   const double *x,
                                   size_t len,
                                   double *out);

/**
 * Writes X^c_H (or ε_H when `evolution`) at `x` into `out`, and R(H) into
 * `reeb_derivative` when it is non-null.
 *
 * # Safety
 * `x` must hold `len` values and `out` `out_len` values.
 */
enum CmStatus cm_hamiltonian_field(const struct CmHamiltonian *h,
                                   const double *x,
                                   size_t len,
                                   bool evolution,
                                   double *out,
                                   size_t out_len,
                                   double *reeb_derivative);

/**
 * Parses a contact Lagrangian L(q, q̇, z); coordinates are `q, qdot, z`
 * (`q1.., qdot1.., z` for n > 1).
 *
 * # Safety
 * As for [`cm_hamiltonian_new`].
 */
enum CmStatus cm_lagrangian_new(size_t n,
                                const char *expr,
                                const char *const *names,
                                const double *values,
                                size_t count,
                                bool degenerate,
                                struct CmLagrangian **out);

/**
 * # Safety
 * `l` must come from [`cm_lagrangian_new`] or be null.
 */
void cm_lagrangian_free(struct CmLagrangian *l);

/**
 * Fixed-step RK4 along X^c_H (or ε_H when `evolution`) over [t0, t1].
 *
 * # Safety
 * `x0` must hold `len` values; `out` must be writable.
 */
enum CmStatus cm_hamiltonian_flow(const struct CmHamiltonian *h,
                                  const double *x0,
                                  size_t len,
                                  double t0,
                                  double t1,
                                  double step,
                                  bool evolution,
                                  struct CmTrajectory **out);

/**
 * Fixed-step RK4 of the Herglotz equations from (q, q̇, z).
 *
 * # Safety
 * As for [`cm_hamiltonian_flow`].
 */
enum CmStatus cm_herglotz_flow(const struct CmLagrangian *l,
                               const double *s0,
                               size_t len,
                               double t0,
                               double t1,
                               double step,
                               bool evolution,
                               struct CmTrajectory **out);

/**
 * # Safety
 * `t` must come from a flow function or be null.
 */
void cm_trajectory_free(struct CmTrajectory *t);

/**
 * Number of samples, or 0 for a null handle.
 *
 * # Safety
 * `t` must be a live handle or null.
 */
size_t cm_trajectory_len(const struct CmTrajectory *t);

/**
 * State dimension, or 0 for a null or empty trajectory.
 *
 * # Safety
 * `t` must be a live handle or null.
 */
size_t cm_trajectory_dim(const struct CmTrajectory *t);

/**
 * Copies sample `k` into `time` and `out`.
 *
 * # Safety
 * `out` must hold `out_len` values; `time` must be writable or null.
 */
enum CmStatus cm_trajectory_sample(const struct CmTrajectory *t,
                                   size_t k,
                                   double *time,
                                   double *out,
                                   size_t out_len);

/**
 * The trajectory as CSV (header `t,<columns>`); free with [`cm_string_free`].
 * Returns null for a null handle.
 *
 * # Safety
 * `t` must be a live handle or null.
 */
char *cm_trajectory_csv(const struct CmTrajectory *t);

/**
 * Builds one of the Tulczyjew maps for `n` degrees of freedom.
 *
 * # Safety
 * `out` must be writable.
 */
enum CmStatus cm_map_new(enum CmMapKind kind, size_t n, struct CmMap **out);

/**
 * The partial Legendre map φ_J on ℝ^{2m+1}; `j` holds 1-based indices.
 *
 * # Safety
 * `j` must hold `j_len` values; `out` must be writable.
 */
enum CmStatus cm_quantomorphism_new(size_t m, const size_t *j, size_t j_len, struct CmMap **out);

/**
 * # Safety
 * `m` must be a live handle; `out` must be writable.
 */
enum CmStatus cm_map_inverse(const struct CmMap *m, struct CmMap **out);

/**
 * # Safety
 * `m` must be a live handle or null.
 */
size_t cm_map_dim(const struct CmMap *m);

/**
 * # Safety
 * `x` must hold `len` values and `out` `out_len` values.
 */
enum CmStatus cm_map_eval(const struct CmMap *m,
                          const double *x,
                          size_t len,
                          double *out,
                          size_t out_len);

/**
 * # Safety
 * `m` must come from this library or be null.
 */
void cm_map_free(struct CmMap *m);

/**
 * Runs a verification suite and returns its reports as a JSON array in
 * `json` (free with [`cm_string_free`]). Returns `CheckFailed` if any
 * report fails.
 *
 * # Safety
 * `json` must be writable.
 */
enum CmStatus cm_verify(enum CmSuite suite, size_t samples, uint64_t seed, char **json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CONTACT_MECH_H */
