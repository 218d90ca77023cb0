#ifndef SDREAL_H
#define SDREAL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum SdStatus {
  SD_STATUS_OK = 0,
  SD_STATUS_NULL_POINTER = 1,
  SD_STATUS_INVALID_ARGUMENT = 2,
  SD_STATUS_PARSE = 3,
  SD_STATUS_PRECONDITION = 4,
  SD_STATUS_PANIC = 5,
} SdStatus;

/**
 * Multiplication algorithms accepted by [`sd_stream_multiply`].
 */
typedef enum SdMultiplier {
  SD_MULTIPLIER_LIMIT_DIRECT = 0,
  SD_MULTIPLIER_LIMIT_INDIRECT = 1,
  SD_MULTIPLIER_CAUCHY = 2,
} SdMultiplier;

/**
 * A lazily evaluated real in `[-1, 1]`.
 */
typedef struct SdStream SdStream;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *sd_last_error_message(void);

/**
 * The rational `num / den` given as decimal strings; must lie in `[-1, 1]`.
 *
 * # Safety
 * `num` and `den` must be null or NUL-terminated; `out` must be writable.
 */
enum SdStatus sd_stream_from_rational(const char *num, const char *den, struct SdStream **out);

/**
 * The rational `num / den`; must lie in `[-1, 1]`.
 *
 * # Safety
 * `out` must be writable.
 */
enum SdStatus sd_stream_from_i64(int64_t num, int64_t den, struct SdStream **out);

/**
 * The stream of an expression such as `"avg(1/3, sqrt(1/4))"`, after its
 * preconditions are checked.
 *
 * # Safety
 * `expr` must be null or NUL-terminated; `out` must be writable.
 */
enum SdStatus sd_stream_eval(const char *expr, struct SdStream **out);

/**
 * A second handle to the same stream.
 *
 * # Safety
 * `s` must be null or a live handle; `out` must be writable.
 */
enum SdStatus sd_stream_clone(const struct SdStream *s, struct SdStream **out);

/**
 * Square root. Fails with `PRECONDITION` when `x` is a known negative
 * rational.
 *
 * # Safety
 * `x` must be null or a live handle; `out` must be writable.
 */
enum SdStatus sd_stream_sqrt(const struct SdStream *x, struct SdStream **out);

/**
 * `(a + b) / 2`.
 *
 * # Safety
 * `a` and `b` must be null or live handles; `out` must be writable.
 */
enum SdStatus sd_stream_average(const struct SdStream *a,
                                const struct SdStream *b,
                                struct SdStream **out);

/**
 * `a * b` with one of the [`SdMultiplier`] algorithms.
 *
 * # Safety
 * `a` and `b` must be null or live handles; `out` must be writable.
 */
enum SdStatus sd_stream_multiply(const struct SdStream *a,
                                 const struct SdStream *b,
                                 uint32_t algorithm,
                                 struct SdStream **out);

/**
 * `a / b`. Requires `1/4 <= b` and `|a| <= b`; known rationals violating
 * this fail with `PRECONDITION`.
 *
 * # Safety
 * `a` and `b` must be null or live handles; `out` must be writable.
 */
enum SdStatus sd_stream_divide(const struct SdStream *a,
                               const struct SdStream *b,
                               struct SdStream **out);

/**
 * Writes the first `n` digits (each -1, 0 or 1) into `buf`.
 *
 * # Safety
 * `s` must be null or a live handle; `buf` must hold `n` bytes.
 */
enum SdStatus sd_stream_prefix(const struct SdStream *s, size_t n, int8_t *buf);

/**
 * The first `n` digits as a string over `+`, `0` and `-`.
 *
 * # Safety
 * `s` must be null or a live handle; `out` must be writable.
 */
enum SdStatus sd_stream_render(const struct SdStream *s, size_t n, char **out);

/**
 * The value of the first `n` digits as a reduced fraction of decimal
 * strings.
 *
 * # Safety
 * `s` must be null or a live handle; `num` and `den` must be writable.
 */
enum SdStatus sd_stream_approx(const struct SdStream *s, size_t n, char **num, char **den);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `s` must be null or a handle not yet freed.
 */
void sd_stream_free(struct SdStream *s);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string from this library not yet freed.
 */
void sd_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SDREAL_H */
