/* SPDX-License-Identifier: Apache-2.0 */

#ifndef BUNCHING_H
#define BUNCHING_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result code of every entry point. Zero is success.
typedef enum BunchingStatus {
  BUNCHING_STATUS_OK = 0,
  BUNCHING_STATUS_NULL_POINTER = 1,
  BUNCHING_STATUS_INVALID_ARGUMENT = 2,
  BUNCHING_STATUS_SIZE_LIMIT = 3,
  BUNCHING_STATUS_CONSERVATION = 4,
  BUNCHING_STATUS_TIE = 5,
  BUNCHING_STATUS_PARSE = 6,
  BUNCHING_STATUS_INTERNAL = 7,
  BUNCHING_STATUS_PANIC = 8,
} BunchingStatus;

// Opaque pairwise-context behavior.
typedef struct BunchingBehavior BunchingBehavior;

// Opaque interferometer unitary.
typedef struct BunchingUnitary BunchingUnitary;

// Per-photon marginal of one mode before and after adding photons.
typedef struct BunchingNoSignalling {
  double marginal_before;
  double marginal_after;
  double difference;
} BunchingNoSignalling;

// Marginal-consistency check. `worst_observable` is one-based, 0 if no
// observable appears in two contexts.
typedef struct BunchingNoDisturbance {
  bool pass;
  size_t worst_observable;
  double max_gap;
} BunchingNoDisturbance;

// Classical, no-disturbance and arithmetic bounds of a cycle correlator sum.
typedef struct BunchingBounds {
  double classical_min;
  double classical_max;
  double nd_min;
  double nd_max;
  double arithmetic_min;
  double arithmetic_max;
} BunchingBounds;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null after a success.
// The pointer stays valid until the next call on the same thread.
const char *bunching_last_error(void);

// Library version as a static NUL-terminated string.
const char *bunching_version(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must be null or a string returned by this library and not yet freed.
void bunching_string_free(char *s);

// Permanent of an `n × n` complex matrix in row-major order. `im` may be
// null for a real matrix.
//
// # Safety
// `re` (and `im` if non-null) must point to `n * n` doubles.
enum BunchingStatus bunching_permanent(const double *re,
                                       const double *im,
                                       size_t n,
                                       double *out_re,
                                       double *out_im);

// Validates and wraps an `n × n` unitary given in row-major order, with
// entry `(out, in)` the amplitude from input mode `in` to output mode `out`.
//
// # Safety
// `re` (and `im` if non-null) must point to `n * n` doubles; `result` must be
// writable.
enum BunchingStatus bunching_unitary_new(const double *re,
                                         const double *im,
                                         size_t n,
                                         struct BunchingUnitary **result);

// The balanced beam splitter `(1/√2)[[1, 1], [1, −1]]`.
//
// # Safety
// `result` must be writable.
enum BunchingStatus bunching_unitary_beam_splitter(struct BunchingUnitary **result);

// # Safety
// `u` must be null or a handle from this library not yet freed.
void bunching_unitary_free(struct BunchingUnitary *u);

// Probability of scattering `input` into `output`; both have `modes` entries.
//
// # Safety
// `u` must be a live handle; `input` and `output` must point to `modes`
// counts; `result` must be writable.
enum BunchingStatus bunching_transition_probability(const struct BunchingUnitary *u,
                                                    const size_t *input,
                                                    const size_t *output,
                                                    size_t modes,
                                                    double *result);

// Full output distribution as a JSON array of `{"occupations", "p"}`.
//
// # Safety
// `u` must be a live handle; `input` must point to `modes` counts; `result`
// must be writable. Free the string with [`bunching_string_free`].
enum BunchingStatus bunching_output_distribution_json(const struct BunchingUnitary *u,
                                                      const size_t *input,
                                                      size_t modes,
                                                      char **result);

// Expected fraction of the photons found in output `mode`.
//
// # Safety
// `u` must be a live handle; `input` must point to `modes` counts; `result`
// must be writable.
enum BunchingStatus bunching_per_photon_marginal(const struct BunchingUnitary *u,
                                                 const size_t *input,
                                                 size_t modes,
                                                 size_t mode,
                                                 double *result);

// Per-photon marginal of `mode` for input `base` and for `added`.
//
// # Safety
// `u` must be a live handle; `base` and `added` must point to `modes`
// counts; `result` must be writable.
enum BunchingStatus bunching_no_signalling(const struct BunchingUnitary *u,
                                           const size_t *base,
                                           const size_t *added,
                                           size_t modes,
                                           size_t mode,
                                           struct BunchingNoSignalling *result);

// Outcomes (+1 or −1) of the λ-model in context `(first, second)`, labels
// one-based.
//
// # Safety
// `lambdas` must point to `n` doubles; both out-pointers must be writable.
enum BunchingStatus bunching_lambda_outcome(const double *lambdas,
                                            size_t n,
                                            size_t first,
                                            size_t second,
                                            int8_t *out_first,
                                            int8_t *out_second);

// Exact λ-model behavior. `contexts` holds `n_contexts` one-based label
// pairs. `law_json` may be null for i.i.d. uniform λ.
//
// # Safety
// `contexts` must point to `2 * n_contexts` labels; `law_json` must be null
// or NUL-terminated; `result` must be writable.
enum BunchingStatus bunching_behavior_lambda_exact(size_t observables,
                                                   const size_t *contexts,
                                                   size_t n_contexts,
                                                   const char *law_json,
                                                   struct BunchingBehavior **result);

// Monte Carlo λ-model behavior from `samples` draws with `seed`.
//
// # Safety
// As for [`bunching_behavior_lambda_exact`].
enum BunchingStatus bunching_behavior_lambda_sampled(size_t observables,
                                                     const size_t *contexts,
                                                     size_t n_contexts,
                                                     const char *law_json,
                                                     uint64_t samples,
                                                     uint64_t seed,
                                                     struct BunchingBehavior **result);

// Point-mass behavior of a deterministic assignment; `values` holds one
// +1/−1 per observable.
//
// # Safety
// `contexts` must point to `2 * n_contexts` labels; `values` to
// `observables` entries; `result` must be writable.
enum BunchingStatus bunching_behavior_deterministic(size_t observables,
                                                    const size_t *contexts,
                                                    size_t n_contexts,
                                                    const int8_t *values,
                                                    struct BunchingBehavior **result);

// Parses and validates a behavior in the JSON scenario format.
//
// # Safety
// `json` must be NUL-terminated; `result` must be writable.
enum BunchingStatus bunching_behavior_from_json(const char *json, struct BunchingBehavior **result);

// Serializes a behavior. Free the string with [`bunching_string_free`].
//
// # Safety
// `b` must be a live handle; `result` must be writable.
enum BunchingStatus bunching_behavior_to_json(const struct BunchingBehavior *b, char **result);

// # Safety
// `b` must be null or a handle from this library not yet freed.
void bunching_behavior_free(struct BunchingBehavior *b);

// `E = P(++) + P(−−) − P(+−) − P(−+)` in context `(first, second)`.
//
// # Safety
// `b` must be a live handle; `result` must be writable.
enum BunchingStatus bunching_correlator(const struct BunchingBehavior *b,
                                        size_t first,
                                        size_t second,
                                        double *result);

// Correlator sum along the cycle on the behavior's observables.
//
// # Safety
// `b` must be a live handle; `result` must be writable.
enum BunchingStatus bunching_cycle_value(const struct BunchingBehavior *b, double *result);

// # Safety
// `b` must be a live handle; `result` must be writable.
enum BunchingStatus bunching_no_disturbance_check(const struct BunchingBehavior *b,
                                                  double tolerance,
                                                  struct BunchingNoDisturbance *result);

// All six bounds of the correlator sum on the `n`-cycle.
//
// # Safety
// `result` must be writable.
enum BunchingStatus bunching_cycle_bounds(size_t n, struct BunchingBounds *result);

// Runs a scenario document and returns the JSON run report. `seed` may be
// null to use the scenario's own seed.
//
// # Safety
// `json` must be NUL-terminated; `seed` null or readable; `result` writable.
enum BunchingStatus bunching_run_scenario_json(const char *json,
                                               const uint64_t *seed,
                                               char **result);

// Consolidated reproduction report as JSON. `samples == 0` skips the Monte
// Carlo rows.
//
// # Safety
// `result` must be writable.
enum BunchingStatus bunching_reproduce_reply(uint64_t samples, uint64_t seed, char **result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BUNCHING_H */
