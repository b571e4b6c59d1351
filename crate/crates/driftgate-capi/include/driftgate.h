#ifndef DRIFTGATE_H
#define DRIFTGATE_H

/* Generated from the driftgate-capi crate by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Outcome of a fallible call.
typedef enum DgStatus {
  // The call succeeded; for `dg_validate`, the schemas conform.
  DG_STATUS_OK = 0,
  // The schemas do not conform; a drift report is available.
  DG_STATUS_DRIFT = 1,
  // The call failed; `dg_last_error_message` explains why.
  DG_STATUS_ERROR = 2,
} DgStatus;

// Named constants for the `uint32_t` policy codes.
enum DgPolicy
#if defined(__cplusplus) || __STDC_VERSION__ >= 202311L
  : uint32_t
#endif // defined(__cplusplus) || __STDC_VERSION__ >= 202311L
 {
  DG_POLICY_EXACT = 0,
  DG_POLICY_EXACT_UNORDERED_CI = 1,
  DG_POLICY_EXACT_ORDERED = 2,
  DG_POLICY_EXACT_ORDERED_CI = 3,
  DG_POLICY_EXACT_BY_POSITION = 4,
  DG_POLICY_BACKWARD = 5,
  DG_POLICY_FORWARD = 6,
  DG_POLICY_FULL = 7,
};
#ifndef __cplusplus
#if __STDC_VERSION__ >= 202311L
typedef enum DgPolicy DgPolicy;
#else
typedef uint32_t DgPolicy;
#endif // __STDC_VERSION__ >= 202311L
#endif // __cplusplus

// Drift report. Opaque; produced by `dg_validate` on disagreement,
// released with `dg_report_free`.
typedef struct DgReport DgReport;

// Parsed schema. Opaque; created by `dg_schema_parse` or
// `dg_schema_infer_jsonl`, released with `dg_schema_free`.
typedef struct DgSchema DgSchema;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses the canonical JSON schema document in `text` into a new handle
// stored at `out`.
//
// # Safety
// `text` must be a valid NUL-terminated string and `out` a valid pointer.
enum DgStatus dg_schema_parse(const char *text, struct DgSchema **out);

// Infers a schema from the JSON Lines text in `text` (one record per line)
// into a new handle stored at `out`.
//
// # Safety
// `text` must be a valid NUL-terminated string and `out` a valid pointer.
enum DgStatus dg_schema_infer_jsonl(const char *text, struct DgSchema **out);

// Renders a schema as its canonical JSON document. Returns NULL on error.
//
// # Safety
// `schema` must be a live handle from this library or NULL.
char *dg_schema_serialize(const struct DgSchema *schema);

// Releases a schema handle. NULL is accepted and ignored.
//
// # Safety
// `schema` must be a live handle from this library or NULL; it must not be
// used afterwards.
void dg_schema_free(struct DgSchema *schema);

// Checks `producer` against `contract` under the policy named by `policy`.
//
// Returns `Ok` when the schemas conform. Returns `Drift` when they do not;
// if `out_report` is non-NULL it then receives a report handle, otherwise
// the report is discarded. On `Ok` a non-NULL `out_report` is set to NULL.
//
// # Safety
// `producer` and `contract` must be live handles from this library;
// `out_report` must be NULL or a valid pointer.
enum DgStatus dg_validate(const struct DgSchema *producer,
                          const struct DgSchema *contract,
                          uint32_t policy,
                          struct DgReport **out_report);

// Returns the policy token a report was produced under, for example
// "exact" or "backward". Returns NULL on error.
//
// # Safety
// `report` must be a live handle from this library or NULL.
char *dg_report_policy_name(const struct DgReport *report);

// Number of drift items in a report; 0 for NULL.
//
// # Safety
// `report` must be a live handle from this library or NULL.
size_t dg_report_item_count(const struct DgReport *report);

// Diagnostic line of one drift item. Returns NULL when `index` is out of
// range.
//
// # Safety
// `report` must be a live handle from this library or NULL.
char *dg_report_item_message(const struct DgReport *report, size_t index);

// Full report text, one diagnostic line per drift item. Returns NULL on
// error.
//
// # Safety
// `report` must be a live handle from this library or NULL.
char *dg_report_render_text(const struct DgReport *report);

// Releases a report handle. NULL is accepted and ignored.
//
// # Safety
// `report` must be a live handle from this library or NULL; it must not be
// used afterwards.
void dg_report_free(struct DgReport *report);

// Stable token of a policy code, for example "exact-ordered" for
// `DG_POLICY_EXACT_ORDERED`. Returns NULL for an unknown code.
char *dg_policy_name(uint32_t policy);

// Copy of the most recent error message on this thread, or NULL when the
// last fallible call succeeded.
char *dg_last_error_message(void);

// Releases a string returned by this library. NULL is accepted and
// ignored.
//
// # Safety
// `text` must have been returned by this library or be NULL; it must not
// be used afterwards.
void dg_string_free(char *text);

// Library version as a string, for example "0.1.0".
char *dg_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DRIFTGATE_H */
