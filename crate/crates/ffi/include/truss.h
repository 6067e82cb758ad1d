#ifndef TRUSS_H
#define TRUSS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TrussStatus {
  TRUSS_STATUS_OK = 0,
  TRUSS_STATUS_NULL_POINTER = 1,
  TRUSS_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The edge is already in the graph.
   */
  TRUSS_STATUS_DUPLICATE = 3,
  TRUSS_STATUS_SELF_LOOP = 4,
  TRUSS_STATUS_UNKNOWN_EDGE = 5,
  TRUSS_STATUS_IO = 6,
  TRUSS_STATUS_PARSE = 7,
  /**
   * The output buffer is too small; the required length was written.
   */
  TRUSS_STATUS_BUFFER_TOO_SMALL = 8,
  /**
   * Truss numbers disagree with a full recompute.
   */
  TRUSS_STATUS_VERIFICATION_FAILED = 9,
  TRUSS_STATUS_PANIC = 10,
} TrussStatus;

/**
 * Values accepted by the `variant` argument of the constructors.
 */
typedef enum TrussVariant {
  TRUSS_VARIANT_HCQTY = 0,
  TRUSS_VARIANT_JK_INC = 1,
} TrussVariant;

/**
 * Opaque engine handle.
 */
typedef struct TrussEngine TrussEngine;

typedef struct TrussEdge {
  uint64_t u;
  uint64_t v;
  uint32_t k;
} TrussEdge;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *truss_last_error(void);

/**
 * Creates an empty engine. `variant` is a [`TrussVariant`] value.
 *
 * # Safety
 * `out` must be null or point to writable storage for one pointer.
 */
enum TrussStatus truss_engine_new(uint32_t variant, struct TrussEngine **out);

/**
 * Loads a whitespace-separated `SRC DST [TIMESTAMP]` edge list and decomposes
 * the whole graph. Self-loops and repeated edges in the file are dropped.
 *
 * # Safety
 * `path` must be null or a NUL-terminated string; `out` must be null or
 * point to writable storage for one pointer.
 */
enum TrussStatus truss_engine_load(const char *path, uint32_t variant, struct TrussEngine **out);

/**
 * Releases an engine. Null is ignored.
 *
 * # Safety
 * `engine` must be null or a handle from this library not yet freed.
 */
void truss_engine_free(struct TrussEngine *engine);

/**
 * Runs the levels of each insertion concurrently when `enabled`.
 *
 * # Safety
 * `engine` must be null or a live handle.
 */
enum TrussStatus truss_engine_set_parallel_levels(struct TrussEngine *engine, bool enabled);

/**
 * Inserts `{u, v}` and updates truss numbers. On success the new edge's
 * truss number is written to `out_k` when it is not null.
 *
 * # Safety
 * `engine` must be null or a live handle; `out_k` must be null or writable.
 */
enum TrussStatus truss_insert_edge(struct TrussEngine *engine,
                                   uint64_t u,
                                   uint64_t v,
                                   uint32_t *out_k);

/**
 * Inserts `count` edges given as `2 * count` labels `u0 v0 u1 v1 ...`.
 * Self-loops, edges already present and repeats within the batch are
 * skipped; the number actually added goes to `out_accepted` when not null.
 *
 * # Safety
 * `engine` must be null or a live handle; `pairs` must be null or point to
 * `2 * count` readable values; `out_accepted` must be null or writable.
 */
enum TrussStatus truss_insert_batch(struct TrussEngine *engine,
                                    const uint64_t *pairs,
                                    size_t count,
                                    size_t *out_accepted);

/**
 * Truss number of the edge `{u, v}`.
 *
 * # Safety
 * `engine` must be null or a live handle; `out_k` must be null or writable.
 */
enum TrussStatus truss_truss_number(const struct TrussEngine *engine,
                                    uint64_t u,
                                    uint64_t v,
                                    uint32_t *out_k);

/**
 * Largest truss number, 0 for an empty graph or a null handle.
 *
 * # Safety
 * `engine` must be null or a live handle.
 */
uint32_t truss_ktmax(const struct TrussEngine *engine);

/**
 * # Safety
 * `engine` must be null or a live handle.
 */
size_t truss_edge_count(const struct TrussEngine *engine);

/**
 * Distinct labels seen so far, including endpoints of rejected edges.
 *
 * # Safety
 * `engine` must be null or a live handle.
 */
size_t truss_vertex_count(const struct TrussEngine *engine);

/**
 * Recomputes from scratch and compares.
 *
 * # Safety
 * `engine` must be null or a live handle.
 */
enum TrussStatus truss_verify(const struct TrussEngine *engine);

/**
 * Copies every edge with its truss number into `buf`, in insertion order.
 * `out_len` always receives the edge count; if it exceeds `capacity`
 * nothing is copied and `TRUSS_STATUS_BUFFER_TOO_SMALL` is returned.
 *
 * # Safety
 * `engine` must be null or a live handle; `buf` must be null or point to
 * `capacity` writable [`TrussEdge`]s; `out_len` must be null or writable.
 */
enum TrussStatus truss_export_edges(const struct TrussEngine *engine,
                                    struct TrussEdge *buf,
                                    size_t capacity,
                                    size_t *out_len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TRUSS_H */
