#ifndef QALU_H
#define QALU_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result code of every fallible call.
typedef enum QaluStatus {
  QALU_STATUS_OK = 0,
  QALU_STATUS_INVALID_ARGUMENT = 1,
  QALU_STATUS_NULL_POINTER = 2,
  QALU_STATUS_SUCCESS_UNDERFLOW = 3,
  QALU_STATUS_NON_MONOTONE = 4,
  QALU_STATUS_DISCREPANCY = 5,
  QALU_STATUS_PANIC = 6,
} QaluStatus;

// TTG variant.
typedef enum QaluTtgType {
  QALU_TTG_TYPE_I = 0,
  QALU_TTG_TYPE_II = 1,
  QALU_TTG_TYPE_III = 2,
} QaluTtgType;

// Measurement error rule for threshold searches.
typedef enum QaluPmRule {
  QALU_PM_RULE_EQUAL = 0,
  QALU_PM_RULE_FOUR_FIFTEENTHS = 1,
} QaluPmRule;

// Opaque local-noise model.
typedef struct QaluNoise QaluNoise;

// Opaque pumping result.
typedef struct QaluPumpResult QaluPumpResult;

// Topological error-model probabilities.
typedef struct QaluQTuple {
  double qa;
  double qb;
  double qc;
  double qab;
  double qac;
  double qbb;
} QaluQTuple;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *qalu_version(void);

// Message of the last failed call on this thread, or NULL. Valid until the
// next failing call on the same thread.
const char *qalu_last_error_message(void);

// Uniform depolarizing gate noise with total error `p_g` and measurement error `p_m`.
//
// # Safety
// `out_noise` must be valid for writes.
enum QaluStatus qalu_noise_uniform(double p_g, double p_m, struct QaluNoise **out_noise);

// Noise from an explicit row-major 4x4 gate table summing to one.
//
// # Safety
// `table` must point to 16 doubles; `out_noise` must be valid for writes.
enum QaluStatus qalu_noise_from_table(const double *table,
                                      double p_m,
                                      struct QaluNoise **out_noise);

// # Safety
// `noise` must be NULL or a handle from this library not yet freed.
void qalu_noise_free(struct QaluNoise *noise);

// Double-selection pumping of a Werner channel of fidelity `fidelity`.
//
// # Safety
// `noise` must be a live handle; `out_result` must be valid for writes.
enum QaluStatus qalu_pump_double(double fidelity,
                                 uint32_t n1,
                                 uint32_t m1,
                                 uint32_t m2,
                                 const struct QaluNoise *noise,
                                 struct QaluPumpResult **out_result);

// Single-selection pumping.
//
// # Safety
// As for [`qalu_pump_double`].
enum QaluStatus qalu_pump_single(double fidelity,
                                 uint32_t n1,
                                 uint32_t n2,
                                 const struct QaluNoise *noise,
                                 struct QaluPumpResult **out_result);

// Writes the purified pair's `(F0, F1, F2, F3)`.
//
// # Safety
// `result` must be a live handle; `out_f` must point to 4 writable doubles.
enum QaluStatus qalu_pump_result_fidelity(const struct QaluPumpResult *result, double *out_f);

// Writes the per-level success probabilities (2 for single, 3 for double
// pumping) into `out_p` of capacity `len`, and their count into `out_len`.
//
// # Safety
// `out_p` must point to `len` writable doubles; `out_len` must be valid for writes.
enum QaluStatus qalu_pump_result_success(const struct QaluPumpResult *result,
                                         double *out_p,
                                         uintptr_t len,
                                         uintptr_t *out_len);

// # Safety
// `result` must be NULL or a handle from this library not yet freed.
void qalu_pump_result_free(struct QaluPumpResult *result);

// First-order TTG error table, row-major, rows on the syndrome qubit.
//
// # Safety
// `f_bar` must point to 4 doubles, `out_table` to 16 writable doubles.
enum QaluStatus qalu_ttg_table(enum QaluTtgType kind,
                               const double *f_bar,
                               const struct QaluNoise *noise,
                               double *out_table);

// Error model for a purified pair `f_bar` under uniform noise.
//
// # Safety
// `f_bar` must point to 4 doubles; `out_q` must be valid for writes.
enum QaluStatus qalu_q_values(const double *f_bar,
                              double p_g,
                              double p_m,
                              struct QaluQTuple *out_q);

// Fault-tolerance check with bounds scaled by `margin` in (0, 1].
//
// # Safety
// `q` must be valid for reads; `out_pass` valid for writes.
enum QaluStatus qalu_check_ft(const struct QaluQTuple *q, double margin, bool *out_pass);

// Threshold gate error at channel fidelity `fidelity` for the schedule given by
// `counts[0..n_counts]` (2 counts: single, 3: double pumping).
//
// # Safety
// `counts` must point to `n_counts` values; `out_pg` must be valid for writes.
enum QaluStatus qalu_threshold_pg(double fidelity,
                                  const uint32_t *counts,
                                  uintptr_t n_counts,
                                  enum QaluPmRule rule,
                                  double margin,
                                  double *out_pg);

// Expected cost per TTG for a pumped result. `count_local_ops` adds gates and
// measurements to the base-pair count; `per_level` restarts only failed levels.
//
// # Safety
// `result` must be a live handle; `out_k` valid for writes.
enum QaluStatus qalu_expected_cost(const struct QaluPumpResult *result,
                                   bool count_local_ops,
                                   bool per_level,
                                   double *out_k);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QALU_H */
