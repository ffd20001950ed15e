#ifndef DCA_H
#define DCA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum DcaStatus {
  DCA_STATUS_OK = 0,
  /**
   * The verification ran and found a mismatch; the report is returned.
   */
  DCA_STATUS_FAILED = 1,
  DCA_STATUS_INVALID_ARGUMENT = 2,
  DCA_STATUS_UNKNOWN_NAME = 3,
  DCA_STATUS_COMPUTE_ERROR = 4,
  DCA_STATUS_NULL_POINTER = 5,
  DCA_STATUS_PANIC = 6,
} DcaStatus;

/**
 * Opaque session; create with `dca_session_new`, release with
 * `dca_session_free`.
 */
typedef struct DcaSession DcaSession;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Create a session. `cache_dir` may be null for the default directory.
 *
 * # Safety
 * `cache_dir` is null or a valid NUL-terminated string; `out` is a valid
 * pointer.
 */
enum DcaStatus dca_session_new(int32_t p_order,
                               int32_t buffer,
                               uint32_t degree,
                               int32_t mode_window,
                               int32_t x_order,
                               const char *cache_dir,
                               struct DcaSession **out);

/**
 * # Safety
 * `session` is null or was returned by `dca_session_new` and not yet freed.
 */
void dca_session_free(struct DcaSession *session);

/**
 * Run a named verification and return its report as JSON. Returns
 * `Failed` with the report when the relation does not hold.
 *
 * # Safety
 * `session` is a live session, `relation` a valid string and `out` a valid
 * pointer.
 */
enum DcaStatus dca_verify(const struct DcaSession *session, const char *relation, char **out);

/**
 * Product form and expansion of a structure function as JSON.
 *
 * # Safety
 * As for `dca_verify`.
 */
enum DcaStatus dca_series(const struct DcaSession *session, const char *name, char **out);

/**
 * Pole lines and residues of `A(z)B(w)` as JSON.
 *
 * # Safety
 * As for `dca_verify`, with `a` and `b` valid strings.
 */
enum DcaStatus dca_ope(const struct DcaSession *session, const char *a, const char *b, char **out);

/**
 * Release a string returned by this library.
 *
 * # Safety
 * `s` is null or was returned by this library and not yet freed.
 */
void dca_string_free(char *s);

/**
 * Static description of a status code.
 */
const char *dca_status_message(enum DcaStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DCA_H */
