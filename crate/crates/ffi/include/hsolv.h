/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef HSOLV_H
#define HSOLV_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HsolvSign {
  /**
   * `Y -> +t`
   */
  HSOLV_SIGN_PLUS = 0,
  /**
   * `Y -> -t`
   */
  HSOLV_SIGN_MINUS = 1,
} HsolvSign;

typedef enum HsolvStatus {
  HSOLV_STATUS_OK = 0,
  HSOLV_STATUS_PARSE = 2,
  HSOLV_STATUS_NON_GENERIC = 3,
  HSOLV_STATUS_NUMERICAL = 4,
  HSOLV_STATUS_NULL_POINTER = 5,
  HSOLV_STATUS_INVALID_ARGUMENT = 6,
  HSOLV_STATUS_BUFFER_TOO_SMALL = 7,
  HSOLV_STATUS_PANIC = 8,
} HsolvStatus;

typedef enum HsolvVerdict {
  HSOLV_VERDICT_NOT_SOLVABLE_PROVEN = 0,
  HSOLV_VERDICT_SOLVABLE_CONDITIONAL = 1,
  HSOLV_VERDICT_NOT_SOLVABLE_EVIDENCE = 2,
  HSOLV_VERDICT_INCONCLUSIVE = 3,
} HsolvVerdict;

/**
 * Parsed operator. Create with `hsolv_operator_parse`, release with `hsolv_operator_free`.
 */
typedef struct HsolvOperator HsolvOperator;

typedef struct HsolvExponent {
  double gamma_re;
  double gamma_im;
  double beta_re;
  double beta_im;
  double rho_re;
  double rho_im;
} HsolvExponent;

typedef struct HsolvClassification {
  enum HsolvVerdict verdict;
  /**
   * roots with positive real part
   */
  size_t p_pos;
  size_t p_neg;
  size_t n;
} HsolvClassification;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses a NUL-terminated UTF-8 operator such as `"-X^2 - Y^2"`.
 *
 * # Safety
 * `text` must be a valid C string and `out` a writable pointer.
 */
enum HsolvStatus hsolv_operator_parse(const char *text, struct HsolvOperator **out);

/**
 * # Safety
 * `op` must come from `hsolv_operator_parse` and not be freed twice. Null is ignored.
 */
void hsolv_operator_free(struct HsolvOperator *op);

/**
 * # Safety
 * `op` must be a live handle and `out` writable.
 */
enum HsolvStatus hsolv_operator_degree(const struct HsolvOperator *op, size_t *out);

/**
 * Ordered characteristic roots as interleaved `(re, im)` pairs.
 * `capacity` counts roots, so `re_im` must hold `2 * capacity` doubles.
 *
 * # Safety
 * `op` must be a live handle; `re_im` must hold `2 * capacity` doubles.
 */
enum HsolvStatus hsolv_operator_roots(const struct HsolvOperator *op,
                                      double *re_im,
                                      size_t capacity,
                                      size_t *count);

/**
 * Exponents `gamma_j, beta_j, rho_j` of the realization at parameter `gamma`.
 * An infinite `gamma_re` selects the top-grade limit.
 *
 * # Safety
 * `op` must be a live handle; `out` must hold `capacity` entries.
 */
enum HsolvStatus hsolv_operator_exponents(const struct HsolvOperator *op,
                                          enum HsolvSign sign,
                                          double gamma_re,
                                          double gamma_im,
                                          struct HsolvExponent *out,
                                          size_t capacity,
                                          size_t *count);

/**
 * Smallest singular value of the Schwartz matching test at `gamma`.
 * An infinite `gamma_re` tests the top-grade operator.
 *
 * # Safety
 * `op` must be a live handle and `out` writable.
 */
enum HsolvStatus hsolv_schwartz_sigma_min(const struct HsolvOperator *op,
                                          enum HsolvSign sign,
                                          double gamma_re,
                                          double gamma_im,
                                          double *out);

/**
 * Solvability verdict with default configuration.
 *
 * # Safety
 * `op` must be a live handle and `out` writable.
 */
enum HsolvStatus hsolv_classify(const struct HsolvOperator *op, struct HsolvClassification *out);

/**
 * Full classification report as a JSON string owned by the caller.
 * Release it with `hsolv_string_free`.
 *
 * # Safety
 * `op` must be a live handle and `out` writable.
 */
enum HsolvStatus hsolv_classify_json(const struct HsolvOperator *op, char **out);

/**
 * # Safety
 * `s` must come from this library and not be freed twice. Null is ignored.
 */
void hsolv_string_free(char *s);

/**
 * Message of the last failure on this thread, empty after a success.
 * Valid until the next `hsolv_*` call on the same thread.
 */
const char *hsolv_last_error(void);

const char *hsolv_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HSOLV_H */
