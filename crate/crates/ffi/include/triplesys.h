#ifndef TRIPLESYS_H
#define TRIPLESYS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum TsStatus {
  TS_STATUS_OK = 0,
  TS_STATUS_NULL_POINTER = 1,
  TS_STATUS_INVALID_UTF8 = 2,
  TS_STATUS_PARSE = 3,
  TS_STATUS_UNSUPPORTED_SIZE = 4,
  TS_STATUS_DOMAIN = 5,
  TS_STATUS_PRECONDITION = 6,
  TS_STATUS_NOT_HEREDITARY = 7,
  TS_STATUS_BUDGET_EXCEEDED = 8,
  TS_STATUS_CACHE = 9,
  TS_STATUS_IO = 10,
  TS_STATUS_BUFFER_TOO_SMALL = 11,
  TS_STATUS_PANIC = 12,
} TsStatus;

typedef enum TsPredicate {
  TS_PREDICATE_ALL = 0,
  TS_PREDICATE_F5_FREE = 1,
  TS_PREDICATE_K4_MINUS_FREE = 2,
  TS_PREDICATE_CANCELLATIVE = 3,
  TS_PREDICATE_TRIPARTITE = 4,
} TsPredicate;

// Opaque handle to a triple system.
typedef struct TsSystem TsSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after success.
// The pointer stays valid until the next `ts_*` call on the same thread.
const char *ts_last_error(void);

// Library version as a static NUL-terminated string.
const char *ts_version(void);

// Empty system on `n` vertices.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum TsStatus ts_system_new(size_t n, struct TsSystem **out);

// Parses the text format (`n m` header, then one `a b c` line per edge).
//
// # Safety
// `text` must be a NUL-terminated string; `out` must be writable.
enum TsStatus ts_system_parse(const char *text, struct TsSystem **out);

// Releases a handle. Null is ignored.
//
// # Safety
// `h` must come from this library and not have been freed already.
void ts_system_free(struct TsSystem *h);

// Adds edge `{a, b, c}` (1-based). `added` receives false if it was present.
//
// # Safety
// `h` must be a live handle; `added` may be null.
enum TsStatus ts_system_add_edge(struct TsSystem *h, size_t a, size_t b, size_t c, bool *added);

// # Safety
// `h` must be a live handle; `out` must be writable.
enum TsStatus ts_system_vertex_count(const struct TsSystem *h, size_t *out);

// # Safety
// `h` must be a live handle; `out` must be writable.
enum TsStatus ts_system_edge_count(const struct TsSystem *h, size_t *out);

// Text format, edges in colex order. Free the result with `ts_string_free`.
//
// # Safety
// `h` must be a live handle; `out` must be writable.
enum TsStatus ts_system_serialize(const struct TsSystem *h, char **out);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed already.
void ts_string_free(char *s);

// Whether the system satisfies `predicate`.
//
// # Safety
// `h` must be a live handle; `out` must be writable.
enum TsStatus ts_system_satisfies(const struct TsSystem *h, enum TsPredicate predicate, bool *out);

// Order of the automorphism group (n <= 10).
//
// # Safety
// `h` must be a live handle; `out` must be writable.
enum TsStatus ts_system_aut_order(const struct TsSystem *h, uint64_t *out);

// Number of distinct labelings, `n! / |Aut|` (n <= 10).
//
// # Safety
// `h` must be a live handle; `out` must be writable.
enum TsStatus ts_system_labeled_count(const struct TsSystem *h, uint64_t *out);

// # Safety
// `a` and `b` must be live handles; `out` must be writable.
enum TsStatus ts_system_is_isomorphic(const struct TsSystem *a,
                                      const struct TsSystem *b,
                                      bool *out);

// Optimal 3-partition (n <= 24). `labels` receives one part index in
// `0..=2` per vertex and must hold at least `n` bytes.
//
// # Safety
// `h` must be a live handle; `labels` must point to `len` writable bytes;
// `bad_count` must be writable.
enum TsStatus ts_system_optimal_partition(const struct TsSystem *h,
                                          uint8_t *labels,
                                          size_t len,
                                          size_t *bad_count);

// `s(n) = ⌊n/3⌋ ⌊(n+1)/3⌋ ⌊(n+2)/3⌋`.
uint64_t ts_s(uint64_t n);

// Number of labeled systems on `n` vertices satisfying `predicate`, as a
// decimal string. `oracle` selects brute force (n <= 6) over isomorph-free
// generation (n <= 8).
//
// # Safety
// `out` must be writable; free the string with `ts_string_free`.
enum TsStatus ts_count_labeled(size_t n, enum TsPredicate predicate, bool oracle, char **out);

// Maximum edge count under `predicate` (n <= 7).
//
// # Safety
// `max_edges` must be writable.
enum TsStatus ts_extremal_number(size_t n, enum TsPredicate predicate, size_t *max_edges);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TRIPLESYS_H */
