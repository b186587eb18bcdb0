#ifndef BESOVCLAW_H
#define BESOVCLAW_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

#define BC_OK 0

/**
 * A required pointer argument was null.
 */
#define BC_ERR_NULL 1

/**
 * Malformed or out-of-range input.
 */
#define BC_ERR_INVALID 2

/**
 * CFL condition violated.
 */
#define BC_ERR_CFL 3

/**
 * A cutoff or shift leaves the computational domain.
 */
#define BC_ERR_SUPPORT 4

/**
 * Non-finite values or solver blow-up.
 */
#define BC_ERR_NUMERIC 5

/**
 * A convexity or monotonicity hypothesis does not hold.
 */
#define BC_ERR_HYPOTHESIS 6

/**
 * Output buffer too small.
 */
#define BC_ERR_BUFFER 7

/**
 * Internal panic caught at the boundary.
 */
#define BC_ERR_PANIC 8

/**
 * Opaque flux function handle.
 */
typedef struct BcFlux BcFlux;

/**
 * Opaque solution record handle.
 */
typedef struct BcSolution BcSolution;

/**
 * Result of [`bc_verify_lemma_delta`].
 */
typedef struct BcLemmaReport {
  uintptr_t pairs;
  uintptr_t violations_corrected;
  uintptr_t violations_stated;
  double worst_ratio_corrected;
  double worst_ratio_stated;
  /**
   * 1 when the corrected bound holds on every pair.
   */
  int32_t pass;
} BcLemmaReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread (empty after a success).
 *
 * # Safety
 * The returned pointer is valid until the next call into this library on
 * the same thread and must not be freed.
 */
const char *bc_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *bc_version(void);

/**
 * Creates a flux from a spec such as `burgers`, `even_power:2` or `poly:0,0,0.5`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` a valid pointer. On
 * success `*out` owns a handle to be released with [`bc_flux_free`].
 */
int32_t bc_flux_new(const char *spec, struct BcFlux **out);

/**
 * Releases a flux handle. Null is ignored.
 *
 * # Safety
 * `flux` must come from [`bc_flux_new`] and not have been freed.
 */
void bc_flux_free(struct BcFlux *flux);

/**
 * Evaluates `a(v)` and `a'(v)`.
 *
 * # Safety
 * `flux` must be a live handle; `out_a` and `out_da` valid pointers.
 */
int32_t bc_flux_eval(const struct BcFlux *flux, double v, double *out_a, double *out_da);

/**
 * Finite-volume solve on `[x0, x1] × [0, t1]` with `nx` cells; the number
 * of time rows follows from `cfl`.
 *
 * # Safety
 * `flux` must be a live handle, `init` and `scheme` NUL-terminated strings
 * (`riemann:UL,UR` or `sine:A,P`; `godunov` or `lax_friedrichs`), `out` a
 * valid pointer. On success `*out` owns a handle released with
 * [`bc_solution_free`].
 */
int32_t bc_solve_fv(const struct BcFlux *flux,
                    const char *init,
                    const char *scheme,
                    double x0,
                    double x1,
                    uintptr_t nx,
                    double t1,
                    double cfl,
                    struct BcSolution **out);

/**
 * Releases a solution handle. Null is ignored.
 *
 * # Safety
 * `sol` must come from [`bc_solve_fv`] and not have been freed.
 */
void bc_solution_free(struct BcSolution *sol);

/**
 * Number of time rows and space cells.
 *
 * # Safety
 * `sol` must be a live handle; `nt` and `nx` valid pointers.
 */
int32_t bc_solution_dims(const struct BcSolution *sol, uintptr_t *nt, uintptr_t *nx);

/**
 * Copies the row-major `nt × nx` values into `buf` of length `len`.
 *
 * # Safety
 * `sol` must be a live handle and `buf` point to `len` writable doubles.
 */
int32_t bc_solution_copy_values(const struct BcSolution *sol, double *buf, uintptr_t len);

/**
 * `Δ(u, ū)` for states in `[-vmax, vmax]`.
 *
 * # Safety
 * `flux` must be a live handle and `out` a valid pointer.
 */
int32_t bc_delta(const struct BcFlux *flux, double u, double ubar, double vmax, double *out);

/**
 * Tartar gap `(w−v)(q(w)−q(v)) − (a(w)−a(v))(η(w)−η(v))` for an entropy
 * spec such as `quadratic` or `even_power:2`.
 *
 * # Safety
 * `flux` must be a live handle, `entropy` a NUL-terminated string and
 * `out` a valid pointer.
 */
int32_t bc_tartar_gap(const struct BcFlux *flux,
                      const char *entropy,
                      double v,
                      double w,
                      double *out);

/**
 * `∬ χ² |D^h u|^p` with `direction` 0 for x and 1 for t, and the smooth
 * cutoff supported in `[ta, tb] × [xa, xb]`.
 *
 * # Safety
 * `sol` must be a live handle and `out` a valid pointer.
 */
int32_t bc_increment_functional(const struct BcSolution *sol,
                                uint32_t direction,
                                double h,
                                double p,
                                double ta,
                                double tb,
                                double xa,
                                double xb,
                                double plateau,
                                double *out);

/**
 * Scans `npairs` seeded random pairs in `[-range, range]` against both
 * lower-bound constants for `Δ`. `sharp` selects the sharp convexity
 * certificate (nonzero) or the analytic one (zero).
 *
 * # Safety
 * `flux` must be a live handle and `out` a valid pointer.
 */
int32_t bc_verify_lemma_delta(const struct BcFlux *flux,
                              uintptr_t npairs,
                              uint64_t seed,
                              double range,
                              int32_t sharp,
                              struct BcLemmaReport *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BESOVCLAW_H */
