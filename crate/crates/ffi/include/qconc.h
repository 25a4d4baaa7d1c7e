#ifndef QCONC_H
#define QCONC_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Tolerance used to validate matrices passed in through the C interface.
 */
#define QCONC_INPUT_TOL 1e-9

typedef enum {
  QCONC_STATUS_OK = 0,
  /**
   * A required pointer was null.
   */
  QCONC_STATUS_NULL_POINTER = 1,
  /**
   * Invalid input: shape, normalization, positivity, profile, range.
   */
  QCONC_STATUS_INVALID_INPUT = 2,
  /**
   * Convergence failure or internal inconsistency.
   */
  QCONC_STATUS_NUMERICAL = 3,
  /**
   * A Rust panic was caught at the boundary.
   */
  QCONC_STATUS_PANIC = 4,
} QconcStatus;

typedef enum {
  /**
   * Average entanglement of formation.
   */
  QCONC_OBJECTIVE_AVERAGE_E = 0,
  /**
   * Average generalized concurrence for a profile `(m, n)`.
   */
  QCONC_OBJECTIVE_AVERAGE_D = 1,
} QconcObjective;

typedef enum {
  /**
   * `λ = (u, v)`.
   */
  QCONC_FAMILY_TWO_EIGEN = 0,
  /**
   * `λ = (u, u+v, u+2v)`.
   */
  QCONC_FAMILY_ARITHMETIC_THREE = 1,
} QconcFamily;

/**
 * Opaque density matrix.
 */
typedef struct QconcDensity QconcDensity;

/**
 * Opaque pure state.
 */
typedef struct QconcPureState QconcPureState;

typedef struct {
  double value;
  size_t cardinality;
  size_t iterations;
  bool converged;
} QconcRoofResult;

typedef struct {
  double bound;
  double roof_min;
  double gap;
  bool violated;
  bool converged;
} QconcCertificate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty if none. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *qconc_last_error(void);

/**
 * Library version as a static nul-terminated string.
 */
const char *qconc_version(void);

/**
 * Builds a pure state from its `dim × dim` coefficient matrix
 * (`2·dim²` doubles). The state is rescaled to unit norm if its norm is
 * within 1e-9 of one.
 *
 * # Safety
 * `data` must point to `2·dim²` doubles and `out` must be writable.
 */
QconcStatus qconc_pure_new(size_t dim, const double *data, QconcPureState **out);

/**
 * # Safety
 * `state` must come from `qconc_pure_new` and not be freed twice. Null is ignored.
 */
void qconc_pure_free(QconcPureState *state);

/**
 * Entanglement of formation in bits.
 *
 * # Safety
 * `state` must be a live handle and `out` writable.
 */
QconcStatus qconc_pure_eof(const QconcPureState *state, double *out);

/**
 * The `C_N` concurrence.
 *
 * # Safety
 * `state` must be a live handle and `out` writable.
 */
QconcStatus qconc_pure_concurrence(const QconcPureState *state, double *out);

/**
 * Generalized concurrence `D` for the spectrum profile `(m, n)`.
 *
 * # Safety
 * `state` must be a live handle and `out` writable.
 */
QconcStatus qconc_pure_generalized_concurrence(const QconcPureState *state,
                                               size_t m,
                                               size_t n,
                                               double *out);

/**
 * Local-unitary invariants `I0 = Tr(AA†)` and `I1 = Tr[(AA†)²]`.
 *
 * # Safety
 * `state` must be a live handle; `i0` and `i1` writable.
 */
QconcStatus qconc_pure_invariants(const QconcPureState *state, double *i0, double *i1);

/**
 * Builds a density matrix on `C^dim ⊗ C^dim` from `2·dim⁴` doubles,
 * basis index `dim·i + p`.
 *
 * # Safety
 * `data` must point to `2·dim⁴` doubles and `out` must be writable.
 */
QconcStatus qconc_density_new(size_t dim, const double *data, QconcDensity **out);

/**
 * `|ψ⟩⟨ψ|`.
 *
 * # Safety
 * `state` must be a live handle and `out` writable.
 */
QconcStatus qconc_density_from_pure(const QconcPureState *state, QconcDensity **out);

/**
 * Werner state `p·|Φ⁺⟩⟨Φ⁺| + (1−p)·I/4`, `0 ≤ p ≤ 1`.
 *
 * # Safety
 * `out` must be writable.
 */
QconcStatus qconc_density_werner(double p, QconcDensity **out);

/**
 * # Safety
 * `rho` must come from a `qconc_density_*` constructor and not be freed twice. Null is ignored.
 */
void qconc_density_free(QconcDensity *rho);

/**
 * Local dimension N.
 *
 * # Safety
 * `rho` must be a live handle or null (returns 0).
 */
size_t qconc_density_dim(const QconcDensity *rho);

/**
 * Lower bound on the generalized concurrence for profile `(m, n)`.
 * With `clamp`, negative per-index terms count as zero.
 *
 * # Safety
 * `rho` must be a live handle and `out` writable.
 */
QconcStatus qconc_density_bound(const QconcDensity *rho,
                                size_t m,
                                size_t n,
                                bool clamp,
                                double *out);

/**
 * Lower bound on the entanglement of formation in bits (`n` = 2 or 3).
 *
 * # Safety
 * `rho` must be a live handle and `out` writable.
 */
QconcStatus qconc_density_eof_bound(const QconcDensity *rho, size_t m, size_t n, double *out);

/**
 * Partial-transpose test. `min_eigenvalue` may be null.
 *
 * # Safety
 * `rho` must be a live handle and `is_ppt` writable.
 */
QconcStatus qconc_density_ppt(const QconcDensity *rho, bool *is_ppt, double *min_eigenvalue);

/**
 * Minimizes the average objective over decompositions of `rho`.
 * `m`, `n` are ignored for `AverageE`.
 *
 * # Safety
 * `rho` must be a live handle and `out` writable.
 */
QconcStatus qconc_density_roof(const QconcDensity *rho,
                               QconcObjective objective,
                               size_t m,
                               size_t n,
                               size_t restarts,
                               uint64_t seed,
                               QconcRoofResult *out);

/**
 * Compares the concurrence bound with a numerical roof minimum.
 *
 * # Safety
 * `rho` must be a live handle and `out` writable.
 */
QconcStatus qconc_density_certify(const QconcDensity *rho,
                                  size_t m,
                                  size_t n,
                                  size_t restarts,
                                  uint64_t seed,
                                  QconcCertificate *out);

/**
 * Monotonicity and convexity sums at the point `(u, v)` of a family with
 * multiplicity `m`. `step` ≤ 0 picks the default finite-difference step.
 *
 * # Safety
 * `lemma` and `convexity` must be writable.
 */
QconcStatus qconc_lemma(QconcFamily family,
                        size_t m,
                        double u,
                        double v,
                        double step,
                        double *lemma,
                        double *convexity);

/**
 * Entanglement of formation (bits) of a state with two-eigenvalue
 * concurrence `d` and multiplicity `m`.
 *
 * # Safety
 * `out` must be writable.
 */
QconcStatus qconc_eof_of_concurrence(double d, size_t m, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QCONC_H */
