#ifndef FOLHP_H
#define FOLHP_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FolhpStatus {
  FolhpStatus_Ok = 0,
  FolhpStatus_NullPointer = -1,
  FolhpStatus_InvalidUtf8 = -2,
  FolhpStatus_ParseError = -3,
  FolhpStatus_NotFound = -4,
  FolhpStatus_InvalidArgument = -5,
  FolhpStatus_ScenarioInvalid = -6,
  FolhpStatus_Internal = -7,
} FolhpStatus;

/**
 * Outcome of a check, mirroring the command-line exit codes.
 */
typedef enum FolhpVerdict {
  FolhpVerdict_Pass = 0,
  FolhpVerdict_Fail = 1,
  FolhpVerdict_Undecided = 2,
} FolhpVerdict;

/**
 * A parsed input file.
 */
typedef struct FolhpDocument FolhpDocument;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses DSL text into a new document.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum FolhpStatus folhp_document_parse(const char *text, struct FolhpDocument **out);

/**
 * Releases a document; null is ignored.
 *
 * # Safety
 * `doc` must come from `folhp_document_parse` and not be used afterwards.
 */
void folhp_document_free(struct FolhpDocument *doc);

/**
 * Canonical text of a document.
 *
 * # Safety
 * `doc` must be a live document and `out` a valid pointer.
 */
enum FolhpStatus folhp_document_to_string(const struct FolhpDocument *doc, char **out);

/**
 * Regular-Poisson check of the named bivector (or the first one when
 * `name` is null). Writes a JSON record and the verdict.
 *
 * # Safety
 * Pointers must be valid; `name` may be null.
 */
enum FolhpStatus folhp_check_poisson(const struct FolhpDocument *doc,
                                     const char *name,
                                     uint64_t seed,
                                     char **out_json,
                                     enum FolhpVerdict *out_verdict);

/**
 * Characteristic-class report of the codimension-2 example on
 * `CP^{2n-1}`, checked in real codimension `q`.
 *
 * # Safety
 * `out_json` must be a valid pointer.
 */
enum FolhpStatus folhp_bott_report(uintptr_t n, uintptr_t q, char **out_json);

/**
 * Validates the scenario in `doc`, runs the homotopy and writes the JSON
 * report. `grid` 0 picks the default grid. A rejected scenario returns
 * `ScenarioInvalid` with the violated invariant as the error message.
 *
 * # Safety
 * Pointers must be valid.
 */
enum FolhpStatus folhp_homotopy_run(const struct FolhpDocument *doc,
                                    uint64_t seed,
                                    uintptr_t grid,
                                    double tolerance,
                                    char **out_json,
                                    enum FolhpVerdict *out_verdict);

/**
 * Whether `H^i(V; Z) = 0` for all `i > q + 1`. Negative `zero_above` or
 * `dim` means unknown. `out_degree` receives the offending degree when the
 * verdict is not `Pass` (`Fail`: nonzero group, `Undecided`: unknown).
 *
 * # Safety
 * `zero`/`nonzero` must point to `n_zero`/`n_nonzero` entries (or be null
 * with a zero count); out pointers must be valid.
 */
enum FolhpStatus folhp_haefliger(uintptr_t q,
                                 int64_t zero_above,
                                 int64_t dim,
                                 const uintptr_t *zero,
                                 uintptr_t n_zero,
                                 const uintptr_t *nonzero,
                                 uintptr_t n_nonzero,
                                 enum FolhpVerdict *out_verdict,
                                 uintptr_t *out_degree);

/**
 * Releases a string returned by this library; null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void folhp_string_free(char *s);

/**
 * Message for the last failed call on this thread; empty after success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *folhp_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FOLHP_H */
