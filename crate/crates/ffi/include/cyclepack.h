#ifndef CYCLEPACK_H
#define CYCLEPACK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CpStatus {
  CP_STATUS_OK = 0,
  CP_STATUS_NULL_ARGUMENT = 1,
  CP_STATUS_INVALID_UTF8 = 2,
  // Malformed JSON or a document of the wrong shape.
  CP_STATUS_FORMAT = 3,
  CP_STATUS_INVALID_ARGUMENT = 4,
  // The input does not meet a pipeline's hypotheses.
  CP_STATUS_PRECONDITION = 5,
  // A check ran and rejected its input.
  CP_STATUS_FAILED = 6,
  CP_STATUS_INTERNAL = 7,
  CP_STATUS_PANIC = 8,
} CpStatus;

// Opaque digraph handle.
typedef struct CpDigraph CpDigraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread; empty after a success.
// Valid until the next call on the same thread.
const char *cp_last_error(void);

const char *cp_version(void);

// # Safety
// `s` must be null or a string returned by this library.
void cp_string_free(char *s);

// Parses `{"n": .., "arcs": [[t, h], ..]}`.
//
// # Safety
// `json` must be a nul-terminated string and `out` a valid pointer.
enum CpStatus cp_digraph_from_json(const char *json, struct CpDigraph **out);

// Builds a digraph on `n` vertices from `arc_count` pairs stored flat in
// `arcs` as tail, head, tail, head, ...
//
// # Safety
// `arcs` must point to `2 * arc_count` values (or be null when
// `arc_count` is 0) and `out` must be valid.
enum CpStatus cp_digraph_from_arcs(uintptr_t n,
                                   const uintptr_t *arcs,
                                   uintptr_t arc_count,
                                   struct CpDigraph **out);

// # Safety
// `d` must be null or a handle from this library, not yet freed.
void cp_digraph_free(struct CpDigraph *d);

// # Safety
// `d` must be null or a live handle.
uintptr_t cp_digraph_vertex_count(const struct CpDigraph *d);

// # Safety
// `d` must be null or a live handle.
uintptr_t cp_digraph_arc_count(const struct CpDigraph *d);

// # Safety
// `d` must be a live handle and `out` a valid pointer.
enum CpStatus cp_digraph_to_json(const struct CpDigraph *d, char **out);

// # Safety
// `d` must be a live handle and `out` a valid pointer.
enum CpStatus cp_digraph_to_dot(const struct CpDigraph *d, char **out);

// Number of simple directed cycles; `CP_STATUS_FAILED` when there are
// more than `limit`.
//
// # Safety
// `d` must be a live handle and `out` a valid pointer.
enum CpStatus cp_count_cycles(const struct CpDigraph *d, uintptr_t limit, uintptr_t *out);

// A k-train as `{"spine": [..], "back": [..], "reversed": false}`; needs
// minimum out-degree at least `k`.
//
// # Safety
// `d` must be a live handle and `out` a valid pointer.
enum CpStatus cp_find_k_train(const struct CpDigraph *d, uintptr_t k, char **out);

// Checks a packing `{"cycles": [[..], ..], "claim": {"kind": ..}}`.
// `*ok` receives the verdict; `report`, if not null, receives the
// verdict as JSON.
//
// # Safety
// `d` must be a live handle, `packing_json` a string, `ok` valid and
// `report` null or valid.
enum CpStatus cp_verify_packing(const struct CpDigraph *d,
                                const char *packing_json,
                                bool *ok,
                                char **report);

// Runs the certificate dispatcher on `{"digraph": .., "certificate": ..}`
// and returns `{"route": .., "cycles": [..]}`. `k = 0` asks for the
// three-cycle theorem on the non-strong wall route.
//
// # Safety
// `bundle_json` must be a string and `out` a valid pointer.
enum CpStatus cp_pack_dispatch(const char *bundle_json, uintptr_t k, char **out);

// Runs one acceptance criterion (1..=10).
//
// # Safety
// `ok` must be a valid pointer.
enum CpStatus cp_selftest(uintptr_t criterion, bool *ok);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CYCLEPACK_H */
