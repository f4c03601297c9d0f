/* C interface for the qpmut computer-algebra library. */

#ifndef QPMUT_H
#define QPMUT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status code: success.
#define QP_OK 0

// Status code: invalid input (malformed JSON, unknown names, bad indices).
#define QP_ERR_INVALID 1

// Status code: a mathematical precondition failed.
#define QP_ERR_PRECONDITION 2

// Status code: internal panic.
#define QP_ERR_PANIC 3

// Opaque handle to a parsed problem.
typedef struct QpProblem QpProblem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parse a problem from JSON.
//
// On success returns a handle that must be released with
// [`qp_problem_free`]. On failure returns null and, if `error_out` is
// non-null, stores an error message there (release with
// [`qp_string_free`]).
//
// # Safety
// `json` must be a valid NUL-terminated string; `error_out`, if non-null,
// must point to writable storage for one pointer.
struct QpProblem *qp_problem_new_from_json(const char *json, char **error_out);

// Release a problem handle. Passing null is a no-op.
//
// # Safety
// `problem` must be null or a pointer previously returned by
// [`qp_problem_new_from_json`] that has not yet been freed.
void qp_problem_free(struct QpProblem *problem);

// Number of vertices of the problem's species, or 0 if `problem` is null.
//
// # Safety
// `problem` must be null or a live handle.
uintptr_t qp_problem_vertices(const struct QpProblem *problem);

// Run one command against a problem.
//
// `request_json` is an object with a `"command"` field naming the
// operation (`validate`, `delta`, `xgen`, `xmap`, `ideal-dim`, `def-dim`,
// `reduce`, `mutate`, `involution-check`, `matrix`, `seed-potential`,
// `search`) plus that command's parameters, e.g.
// `{"command": "mutate", "k": 2}`. Vertices are 1-based.
//
// On success (return value 0) `*out` holds the JSON report; on failure it
// holds an error message. Either way the string must be released with
// [`qp_string_free`].
//
// # Safety
// `problem` must be a live handle, `request_json` a valid NUL-terminated
// string, and `out` must point to writable storage for one pointer.
int qp_run(const struct QpProblem *problem, const char *request_json, char **out);

// Release a string returned by this library. Passing null is a no-op.
//
// # Safety
// `s` must be null or a string returned by this library that has not yet
// been freed.
void qp_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QPMUT_H */
