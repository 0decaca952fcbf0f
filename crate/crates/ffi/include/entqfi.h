#ifndef ENTQFI_H
#define ENTQFI_H

/* Generated by cbindgen from the entqfi-ffi crate. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  ENTQFI_STATUS_OK = 0,
  ENTQFI_STATUS_NULL_POINTER = 1,
  /**
   * A parameter is out of range or a configuration is inconsistent.
   */
  ENTQFI_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The matrix is not a valid density matrix.
   */
  ENTQFI_STATUS_INVALID_STATE = 3,
  /**
   * An eigensolver failed to converge.
   */
  ENTQFI_STATUS_NUMERICAL = 4,
  ENTQFI_STATUS_IO = 5,
  /**
   * A bug inside the library; the message has details.
   */
  ENTQFI_STATUS_PANIC = 6,
} EntqfiStatus;

/**
 * A two-qubit density matrix.
 */
typedef struct EntqfiState EntqfiState;

typedef struct {
  double max_value;
  /**
   * `(α_A, β_A, γ_A, α_B, β_B, γ_B)`.
   */
  double max_angles[6];
  double min_value;
  double min_angles[6];
  double raw_value;
  double step_used;
  bool refined;
  uint64_t evaluations;
} EntqfiLoccOptimum;

typedef struct {
  size_t count;
  uint64_t master_seed;
  size_t grid_divisor;
  size_t refine_divisor;
  double eps_concurrence;
  double eps_negativity;
  double eps_ree;
  double eps_mqfi;
  size_t ree_components;
  size_t ree_multistarts;
  size_t ree_max_sweeps;
  double ree_threshold;
  size_t witness_limit;
} EntqfiExperimentConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or null if the most
 * recent call succeeded. Valid until the next call into this library on
 * the same thread.
 */
const char *entqfi_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *entqfi_version(void);

/**
 * Builds a state from a 4×4 matrix.
 *
 * # Safety
 * `re` must point to 16 doubles; `im` must be null or point to 16 doubles;
 * `out` must be valid for a write.
 */
EntqfiStatus entqfi_state_new(const double *re, const double *im, EntqfiState **out);

/**
 * Builds the projector onto a pure state with 4 amplitudes.
 *
 * # Safety
 * `re` must point to 4 doubles; `im` must be null or point to 4 doubles;
 * `out` must be valid for a write.
 */
EntqfiStatus entqfi_state_pure(const double *re, const double *im, EntqfiState **out);

/**
 * State `index` of the random ensemble with `seed`.
 *
 * # Safety
 * `out` must be valid for a write.
 */
EntqfiStatus entqfi_state_random(uint64_t seed, size_t index, EntqfiState **out);

/**
 * Releases a state. Null is ignored.
 *
 * # Safety
 * `state` must be null or a handle from this library not yet freed.
 */
void entqfi_state_free(EntqfiState *state);

/**
 * Copies the matrix out in row-major order.
 *
 * # Safety
 * `state` must be a live handle; `re` and `im` must each have room for 16
 * doubles.
 */
EntqfiStatus entqfi_state_matrix(const EntqfiState *state, double *re, double *im);

/**
 * # Safety
 * `state` must be a live handle and `out` valid for a write.
 */
EntqfiStatus entqfi_concurrence(const EntqfiState *state, double *out);

/**
 * # Safety
 * `state` must be a live handle and `out` valid for a write.
 */
EntqfiStatus entqfi_negativity(const EntqfiState *state, double *out);

/**
 * Positive-partial-transpose test, exact for two qubits.
 *
 * # Safety
 * `state` must be a live handle and `out` valid for a write.
 */
EntqfiStatus entqfi_is_separable(const EntqfiState *state, bool *out);

/**
 * Relative entropy of entanglement in bits, with the default solver
 * settings and random starts drawn from `seed`.
 *
 * # Safety
 * `state` must be a live handle, `out_value` valid for a write, and
 * `out_converged` null or valid for a write.
 */
EntqfiStatus entqfi_ree(const EntqfiState *state,
                        uint64_t seed,
                        double *out_value,
                        bool *out_converged);

/**
 * Mean QFI per particle maximized over spin directions, and the maximizing
 * direction.
 *
 * # Safety
 * `state` must be a live handle, `out_value` valid for a write, and
 * `out_direction` null or valid for 3 doubles.
 */
EntqfiStatus entqfi_max_mean_qfi(const EntqfiState *state,
                                 double *out_value,
                                 double *out_direction);

/**
 * Grid search over local rotations with spacing `2π/grid_divisor`, repeated
 * at `2π/refine_divisor` when the first pass leaves either extreme at the
 * raw value.
 *
 * # Safety
 * `state` must be a live handle and `out` valid for a write.
 */
EntqfiStatus entqfi_locc_optimize(const EntqfiState *state,
                                  size_t grid_divisor,
                                  size_t refine_divisor,
                                  EntqfiLoccOptimum *out);

/**
 * The default experiment settings.
 */
EntqfiExperimentConfig entqfi_experiment_config_default(void);

/**
 * Runs the full experiment and writes all result files into `out_dir`.
 *
 * # Safety
 * `config` must point to a config and `out_dir` to a NUL-terminated UTF-8
 * path.
 */
EntqfiStatus entqfi_run_experiment(const EntqfiExperimentConfig *config, const char *out_dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ENTQFI_H */
