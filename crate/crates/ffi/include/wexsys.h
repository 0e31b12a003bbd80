#ifndef WEXSYS_H
#define WEXSYS_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WxRegime {
  WX_REGIME_EXACT = 0,
  WX_REGIME_MINIMAL_NOT_COMPLETE = 1,
  WX_REGIME_COMPLETE_NOT_MINIMAL = 2,
} WxRegime;

typedef enum WxStatus {
  WX_STATUS_OK = 0,
  WX_STATUS_NULL_POINTER = 1,
  WX_STATUS_DOMAIN = 2,
  WX_STATUS_INVALID = 3,
  WX_STATUS_INDEX = 4,
  WX_STATUS_SINGULAR = 5,
  WX_STATUS_ACCURACY = 6,
  WX_STATUS_UNSUPPORTED = 7,
  WX_STATUS_NUMERICAL = 8,
  WX_STATUS_ARITHMETIC = 9,
  WX_STATUS_BUFFER_TOO_SMALL = 10,
  WX_STATUS_PANIC = 11,
} WxStatus;

/**
 * Opaque excluded index set on the trigonometric map.
 */
typedef struct WxExclusion WxExclusion;

/**
 * Opaque table of dual coefficients.
 */
typedef struct WxTable WxTable;

/**
 * Exactness window `[lower, upper)` with the regime of the queried weight.
 */
typedef struct WxVerdict {
  enum WxRegime regime;
  double lower;
  double upper;
} WxVerdict;

typedef struct WxComplex {
  double re;
  double im;
} WxComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *wx_version(void);

/**
 * Message for the last failed call on this thread, or null. Valid until the
 * next call into the library from the same thread.
 */
const char *wx_last_error_message(void);

/**
 * # Safety
 * `out_verdict` must be null or point to writable memory.
 */
enum WxStatus wx_classify(double alpha, size_t m, struct WxVerdict *out_verdict);

/**
 * `∫_0^1 t^beta e^{i theta t} dt` at default tolerances.
 *
 * # Safety
 * `out_value` must be null or writable; `out_error` may be null.
 */
enum WxStatus wx_moment_integral(double beta,
                                 double theta,
                                 struct WxComplex *out_value,
                                 double *out_error);

/**
 * # Safety
 * `indices` must point to `len` readable values; `out_handle` must be writable.
 */
enum WxStatus wx_exclusion_new_trig(const int64_t *indices,
                                    size_t len,
                                    struct WxExclusion **out_handle);

/**
 * # Safety
 * `handle` must be null or come from [`wx_exclusion_new_trig`], freed once.
 */
void wx_exclusion_free(struct WxExclusion *handle);

/**
 * Number of excluded indices, or 0 for a null handle.
 *
 * # Safety
 * `exclusion` must be null or a live handle.
 */
size_t wx_exclusion_size(const struct WxExclusion *exclusion);

/**
 * Builds the table for `n_lo..=n_hi`.
 *
 * # Safety
 * `exclusion` must be a live handle; `out_handle` must be writable.
 */
enum WxStatus wx_table_new(const struct WxExclusion *exclusion,
                           int64_t n_lo,
                           int64_t n_hi,
                           bool exact,
                           struct WxTable **out_handle);

/**
 * # Safety
 * `handle` must be null or come from [`wx_table_new`], freed once.
 */
void wx_table_free(struct WxTable *handle);

/**
 * `a_{n,j}` with 1-based `j`.
 *
 * # Safety
 * `table` must be a live handle; `out_value` must be writable.
 */
enum WxStatus wx_table_coefficient(const struct WxTable *table,
                                   int64_t n,
                                   size_t j,
                                   double *out_value);

/**
 * Exact `a_{n,j}` as a NUL-terminated decimal `p/q` string. The required
 * size including the terminator is written to `out_required` when it is
 * non-null; a buffer that is too small yields `BufferTooSmall`.
 *
 * # Safety
 * `table` must be a live handle; `buf` must hold `buf_len` writable bytes.
 */
enum WxStatus wx_table_coefficient_exact(const struct WxTable *table,
                                         int64_t n,
                                         size_t j,
                                         char *buf,
                                         size_t buf_len,
                                         size_t *out_required);

/**
 * Exact vanishing order of `f_n` at the origin, searched up to `max_order`.
 *
 * # Safety
 * `exclusion` must be a live handle; `out_order` must be writable.
 */
enum WxStatus wx_vanishing_order(const struct WxExclusion *exclusion,
                                 int64_t n,
                                 uint32_t max_order,
                                 uint32_t *out_order);

/**
 * `⟨f_n / t^α, t^α r_m⟩`.
 *
 * # Safety
 * `exclusion` must be a live handle; `out_value` must be writable.
 */
enum WxStatus wx_biorthogonality(const struct WxExclusion *exclusion,
                                 int64_t n,
                                 int64_t m,
                                 struct WxComplex *out_value);

/**
 * Smallest eigenvalue of the Gram matrix truncated to `|n| <= truncation`.
 *
 * # Safety
 * `exclusion` must be a live handle; `out_value` must be writable.
 */
enum WxStatus wx_frame_lower_bound(const struct WxExclusion *exclusion,
                                   double alpha,
                                   size_t truncation,
                                   double *out_value);

/**
 * `‖t^α e^{2πint}‖` in `L²(0,1)`.
 *
 * # Safety
 * `out_value` must be writable.
 */
enum WxStatus wx_weighted_norm(double alpha, int64_t n, double *out_value);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WEXSYS_H */
