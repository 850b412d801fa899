#ifndef VOLCOL_H
#define VOLCOL_H

/* Generated by cbindgen from volcol-capi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call in this API.
 */
typedef enum {
  /**
   * The call succeeded and all out-pointers are filled.
   */
  VC_OK = 0,
  /**
   * A required pointer argument was null.
   */
  VC_NULL_POINTER = 1,
  /**
   * An argument was out of range, unsorted, or otherwise malformed.
   */
  VC_INVALID_ARGUMENT = 2,
  /**
   * Matrix data contained NaN or infinity.
   */
  VC_NOT_FINITE = 3,
  /**
   * The instance has too little numerical rank for the request.
   */
  VC_RANK_DEFICIENT = 4,
  /**
   * The request would enumerate more subsets than the configured cap.
   */
  VC_CAP_EXCEEDED = 5,
  /**
   * An operating system error was reported.
   */
  VC_IO = 6,
  /**
   * An unexpected internal failure; please report it.
   */
  VC_INTERNAL = 7,
} vc_status;

/**
 * Opaque dense row-major matrix handle.
 */
typedef struct vc_matrix vc_matrix;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Last error message of the current thread as a NUL-terminated string.
 *
 * Empty after a successful call. The pointer stays valid until the next
 * call into this library from the same thread; copy it if you keep it.
 */
const char *vc_last_error_message(void);

/**
 * Creates a matrix from `rows * cols` row-major entries.
 *
 * # Safety
 * `data` must point to `len` readable doubles and `out` must be a valid
 * pointer to a `vc_matrix*` slot.
 */
vc_status vc_matrix_create(size_t rows,
                           size_t cols,
                           const double *data,
                           size_t len,
                           vc_matrix **out);

/**
 * Creates the n-by-n identity matrix.
 *
 * # Safety
 * `out` must be a valid pointer to a `vc_matrix*` slot.
 */
vc_status vc_matrix_identity(size_t n, vc_matrix **out);

/**
 * Creates the worst-case instance: `blocks` groups of `block_size` nearly
 * parallel columns, each group's Gram being delta*I + J.
 *
 * # Safety
 * `out` must be a valid pointer to a `vc_matrix*` slot.
 */
vc_status vc_matrix_hard_instance(size_t blocks, size_t block_size, double delta, vc_matrix **out);

/**
 * Releases a matrix handle. Null is ignored.
 *
 * # Safety
 * `m` must be null or a handle returned by this library that has not been
 * freed yet.
 */
void vc_matrix_free(vc_matrix *m);

/**
 * Number of rows, or 0 for a null handle.
 *
 * # Safety
 * `m` must be null or a live handle from this library.
 */
size_t vc_matrix_rows(const vc_matrix *m);

/**
 * Number of columns, or 0 for a null handle.
 *
 * # Safety
 * `m` must be null or a live handle from this library.
 */
size_t vc_matrix_cols(const vc_matrix *m);

/**
 * Reads one entry.
 *
 * # Safety
 * `m` must be a live handle and `out` a valid double slot.
 */
vc_status vc_matrix_get(const vc_matrix *m, size_t row, size_t col, double *out);

/**
 * Squared Frobenius distance to the best rank-k approximation.
 *
 * # Safety
 * `m` must be a live handle and `out` a valid double slot.
 */
vc_status vc_rank_k_error(const vc_matrix *m, size_t k, double *out);

/**
 * Squared Frobenius error of projecting onto the span of the listed
 * columns. `indices` must be strictly increasing.
 *
 * # Safety
 * `m` must be a live handle, `indices` must point to `len` readable
 * size_t values (ignored when `len` is 0), and `out` must be valid.
 */
vc_status vc_residual_trace(const vc_matrix *m, const size_t *indices, size_t len, double *out);

/**
 * Expected residual of completing the listed columns to a volume-sampled
 * r-subset. With `len` 0 this is the unconditioned expectation.
 *
 * # Safety
 * Same contract as [`vc_residual_trace`].
 */
vc_status vc_conditional_expectation(const vc_matrix *m,
                                     const size_t *indices,
                                     size_t len,
                                     size_t r,
                                     double *out);

/**
 * Deterministic selection of r columns by conditional-expectation descent.
 * Writes the chosen indices in increasing order.
 *
 * # Safety
 * `m` must be a live handle, `out_indices` must have room for `r` size_t
 * values, and `out_residual` must be valid.
 */
vc_status vc_greedy_select(const vc_matrix *m, size_t r, size_t *out_indices, double *out_residual);

/**
 * Draws r columns with probability proportional to the squared volume of
 * their span, from the deterministic stream of `seed`. Writes the chosen
 * indices in increasing order.
 *
 * # Safety
 * Same contract as [`vc_greedy_select`].
 */
vc_status vc_volume_sample(const vc_matrix *m,
                           size_t r,
                           uint64_t seed,
                           size_t *out_indices,
                           double *out_residual);

/**
 * Elementary symmetric polynomial S_r of the given values.
 *
 * # Safety
 * `values` must point to `len` readable doubles and `out` must be valid.
 */
vc_status vc_elem_sym(const double *values, size_t len, size_t r, double *out);

/**
 * The ratio S_{r+1}/S_r of the given nonnegative values.
 *
 * # Safety
 * Same contract as [`vc_elem_sym`].
 */
vc_status vc_sym_ratio(const double *values, size_t len, size_t r, double *out);

/**
 * Closed-form floor on the ratio any r-subset of the block instance can
 * achieve against its best rank-k approximation, k being the block count.
 *
 * # Safety
 * `out` must be a valid double slot.
 */
vc_status vc_predicted_block_ratio(size_t blocks,
                                   size_t block_size,
                                   double delta,
                                   size_t r,
                                   double *out);

/**
 * Quality report for a manual selection against the rank-k baseline, as a
 * JSON document. Free the string with [`vc_string_free`].
 *
 * # Safety
 * `m` must be a live handle, `indices` must point to `len` readable
 * size_t values, and `out` must be a valid `char*` slot.
 */
vc_status vc_bound_report_json(const vc_matrix *m,
                               const size_t *indices,
                               size_t len,
                               size_t k,
                               char **out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string returned by this library that has not been
 * freed yet.
 */
void vc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VOLCOL_H */
