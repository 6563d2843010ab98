/* C interface for the khessian solver. Generated by cbindgen; do not edit. */

#ifndef KHESSIAN_H
#define KHESSIAN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Success.
#define KH_OK 0

// A required pointer argument was null.
#define KH_NULL_ARG 1

// A string argument was not valid UTF-8.
#define KH_UTF8 2

// A JSON document could not be parsed or used an unknown key.
#define KH_JSON 3

// An expression source failed to parse; the message names the offset.
#define KH_PARSE 4

// The configuration is structurally invalid (bad dimension, bad k, ...).
#define KH_INVALID 5

// Evaluation or iteration failed numerically (overflow, tolerance not
// reached, degenerate input).
#define KH_NUMERIC 6

// An internal panic was caught at the boundary; please report this.
#define KH_PANIC 7

// Opaque handle owning a validated scalar problem description.
typedef struct KhProblem KhProblem;

// Opaque handle owning a finished solve: the profile and its diagnostics.
typedef struct KhSolveReport KhSolveReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Builds a problem handle from a JSON description (see the crate docs for
// the accepted keys). On success writes a handle that must be released
// with `kh_problem_free`.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be a valid pointer.
int32_t kh_problem_from_json(const char *json, struct KhProblem **out);

// Releases a problem handle. Null is a no-op.
//
// # Safety
// `problem` must be null or a handle obtained from `kh_problem_from_json`
// that has not been freed yet.
void kh_problem_free(struct KhProblem *problem);

// Runs the successive-approximation solver on a problem handle. On
// success writes a report handle that must be released with
// `kh_solve_report_free`.
//
// # Safety
// `problem` must be a live handle; `out` must be a valid pointer.
int32_t kh_solve(const struct KhProblem *problem, struct KhSolveReport **out);

// Releases a report handle. Null is a no-op.
//
// # Safety
// `report` must be null or a handle obtained from `kh_solve` that has not
// been freed yet.
void kh_solve_report_free(struct KhSolveReport *report);

// Number of grid nodes in the solution profile; 0 for a null handle.
//
// # Safety
// `report` must be null or a live report handle.
size_t kh_solve_report_len(const struct KhSolveReport *report);

// Solve status: 0 converged, 1 growth detected, 2 iteration budget
// exhausted; -1 for a null handle.
//
// # Safety
// `report` must be null or a live report handle.
int32_t kh_solve_report_status(const struct KhSolveReport *report);

// Number of operator applications performed; 0 for a null handle.
//
// # Safety
// `report` must be null or a live report handle.
uint64_t kh_solve_report_iterations(const struct KhSolveReport *report);

// Largest solution value on the grid; NaN for a null handle.
//
// # Safety
// `report` must be null or a live report handle.
double kh_solve_report_sup_value(const struct KhSolveReport *report);

// Sup-norm fixed-point defect of a converged run; NaN for a null handle
// or a run that did not converge.
//
// # Safety
// `report` must be null or a live report handle.
double kh_solve_report_residual(const struct KhSolveReport *report);

// Whether the converged profile was certified to lie in the Gamma_k cone.
// False for a null handle or a non-converged run.
//
// # Safety
// `report` must be null or a live report handle.
bool kh_solve_report_gamma_certified(const struct KhSolveReport *report);

// Copies the solution profile into caller-provided buffers. Each of
// `nodes`, `values`, and `derivatives` may independently be null to skip
// that column; non-null buffers must hold exactly `len` doubles, where
// `len` is the value reported by `kh_solve_report_len`.
//
// # Safety
// `report` must be a live report handle and every non-null buffer valid
// for `len` writes.
int32_t kh_solve_report_copy(const struct KhSolveReport *report,
                             double *nodes,
                             double *values,
                             double *derivatives,
                             size_t len);

// Serializes the full report (profile, status, deltas, diagnostics) to
// pretty-printed JSON. The string must be released with `kh_string_free`.
//
// # Safety
// `report` must be a live report handle; `out` must be a valid pointer.
int32_t kh_solve_report_to_json(const struct KhSolveReport *report, char **out);

// Runs a full CLI-equivalent configuration: the JSON takes the same keys
// as a `--config` file (including `mode`) and the artifact returned is
// exactly what the binary would print (CSV for the solve modes by
// default, a JSON report otherwise). The `out` key is rejected; the
// artifact is always returned to the caller. The string must be released
// with `kh_string_free`.
//
// # Safety
// `config_json` must be a NUL-terminated string; `out` must be a valid
// pointer.
int32_t kh_run_json(const char *config_json, char **out);

// Classifies a problem against every theorem branch and returns the JSON
// report. The config uses the same keys as `kh_run_json`; `mode` may be
// omitted (defaults to `classify`), or set to `classify` /
// `classify-system` explicitly. Any other mode is rejected. The string
// must be released with `kh_string_free`.
//
// # Safety
// `config_json` must be a NUL-terminated string; `out` must be a valid
// pointer.
int32_t kh_classify_json(const char *config_json, char **out);

// Evaluates one named structural condition (P2, P3, C1, C2, C3, C4, EQ5,
// EQ5S, EQ12, EQ12S, GATE, EQ13, EQ13S) against the inputs in the config
// and returns the JSON report. `config_json` may be null when the
// defaults suffice. The string must be released with `kh_string_free`.
//
// # Safety
// `condition` must be a NUL-terminated string; `config_json` must be null
// or NUL-terminated; `out` must be a valid pointer.
int32_t kh_check_condition_json(const char *condition, const char *config_json, char **out);

// Message for the most recent failure on this thread, or an empty string
// after a success. The pointer stays valid until the next call into this
// library on the same thread; do not free it.
const char *kh_last_error_message(void);

// Releases a string returned through a `char **out` parameter. Null is a
// no-op.
//
// # Safety
// `s` must be null or a string obtained from this library that has not
// been freed yet.
void kh_string_free(char *s);

// Library version as a static string; do not free.
const char *kh_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KHESSIAN_H */
