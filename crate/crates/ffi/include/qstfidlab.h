#ifndef QSTFIDLAB_H
#define QSTFIDLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QstStatus {
  QST_STATUS_OK = 0,
  QST_STATUS_NULL_POINTER = 1,
  QST_STATUS_INVALID_ARGUMENT = 2,
  QST_STATUS_NUMERICAL = 3,
  QST_STATUS_SAMPLER_FAILURE = 4,
  QST_STATUS_IO = 5,
  QST_STATUS_PANIC = 6,
} QstStatus;

typedef enum QstReduction {
  QST_REDUCTION_R2 = 0,
  QST_REDUCTION_R3 = 1,
  QST_REDUCTION_R4A = 2,
  QST_REDUCTION_R4B = 3,
} QstReduction;

// Opaque density matrix.
typedef struct QstDensityMatrix QstDensityMatrix;

// Opaque normalized pure state.
typedef struct QstPureState QstPureState;

// Monte-Carlo mean with its standard error.
typedef struct QstEstimate {
  double mean;
  double std_error;
  size_t samples;
  uint64_t seed;
} QstEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call on the same thread.
const char *qst_last_error(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void qst_string_free(char *s);

// Builds a state from `dim` interleaved `(re, im)` pairs, normalizing it.
//
// # Safety
// `re_im` must point to `2 * dim` doubles and `out` must be writable.
enum QstStatus qst_state_new(const double *re_im, size_t dim, struct QstPureState **out);

// Parses a state from its JSON file format.
//
// # Safety
// `json` must be a NUL-terminated string and `out` must be writable.
enum QstStatus qst_state_from_json(const char *json, struct QstPureState **out);

// # Safety
// `state` must be a live handle; `out` receives a string for [`qst_string_free`].
enum QstStatus qst_state_to_json(const struct QstPureState *state, char **out);

// # Safety
// `state` must be a live handle and `out` writable.
enum QstStatus qst_state_n_qubits(const struct QstPureState *state, size_t *out);

// Releases a state. Null is ignored.
//
// # Safety
// `state` must come from this library and not have been freed.
void qst_state_free(struct QstPureState *state);

// `|ψ><ψ|` as a new density-matrix handle.
//
// # Safety
// `state` must be a live handle and `out` writable.
enum QstStatus qst_state_to_density(const struct QstPureState *state,
                                    struct QstDensityMatrix **out);

// Sends every qubit of `rho` through its own channel. `f_abs` and `f_phase`
// hold one value per qubit; `f_phase` may be null for real amplitudes.
//
// # Safety
// `rho` must be a live handle, the arrays must hold `n` doubles and `out`
// must be writable.
enum QstStatus qst_apply_channels(const struct QstDensityMatrix *rho,
                                  const double *f_abs,
                                  const double *f_phase,
                                  size_t n,
                                  struct QstDensityMatrix **out);

// # Safety
// `rho` must be a live handle and `out` writable.
enum QstStatus qst_density_trace(const struct QstDensityMatrix *rho, double *out);

// # Safety
// `rho` must be a live handle; `out` receives a string for [`qst_string_free`].
enum QstStatus qst_density_to_json(const struct QstDensityMatrix *rho, char **out);

// Releases a density matrix. Null is ignored.
//
// # Safety
// `rho` must come from this library and not have been freed.
void qst_density_free(struct QstDensityMatrix *rho);

// `<ψ|ρ|ψ>`.
//
// # Safety
// Both handles must be live and `out` writable.
enum QstStatus qst_fidelity(const struct QstPureState *state,
                            const struct QstDensityMatrix *rho,
                            double *out);

// Single-qubit average fidelity `1/3 + |1 + f|²/6`.
//
// # Safety
// `out` must be writable.
enum QstStatus qst_avg_fidelity_single(double f_abs, double f_phase, double *out);

// Haar-averaged `n`-qubit fidelity.
//
// # Safety
// `out` must be writable.
enum QstStatus qst_avg_fidelity_haar(size_t n, double f_abs, double f_phase, double *out);

// Reduction factor at single-qubit average fidelity `f1` in `[1/2, 1]`.
//
// # Safety
// `out` must be writable.
enum QstStatus qst_reduction_factor(enum QstReduction kind, double f1, double *out);

// Class-averaged three-qubit fidelity for a tag such as `"c4b"`.
//
// # Safety
// `tag_name` must be a NUL-terminated string and `out` writable.
enum QstStatus qst_class_avg_fidelity(const char *tag_name, double f1, double *out);

// Average fidelity of a named four-qubit state (`"GHZ4"`, `"Cl4"`, `"X4"`,
// `"B2"`, `"W4"`).
//
// # Safety
// `tag_name` must be a NUL-terminated string and `out` writable.
enum QstStatus qst_four_qubit_avg_fidelity(const char *tag_name, double f1, double *out);

// Classifies the canonical state `lambda[0..5]`, `phi`. `out` receives the
// class label, or `"unclassified"`.
//
// # Safety
// `lambda` must point to five doubles; `out` receives a string for
// [`qst_string_free`].
enum QstStatus qst_classify_canonical(const double *lambda, double phi, double tol, char **out);

// Monte-Carlo Haar average of the `n`-qubit transfer fidelity.
//
// # Safety
// `out` must be writable.
enum QstStatus qst_mc_fidelity_haar(size_t n,
                                    double f_abs,
                                    double f_phase,
                                    size_t samples,
                                    uint64_t seed,
                                    struct QstEstimate *out);

// Monte-Carlo average over the local-unitary orbit of `state`.
//
// # Safety
// `state` must be a live handle and `out` writable.
enum QstStatus qst_mc_fidelity_orbit(const struct QstPureState *state,
                                     double f_abs,
                                     double f_phase,
                                     size_t samples,
                                     uint64_t seed,
                                     struct QstEstimate *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QSTFIDLAB_H */
