#ifndef SFVG_H
#define SFVG_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Weight mode: signed amplitude difference `y[j] - y[i]`.
 */
#define SFVG_WEIGHTS_SIGNED 0

/**
 * Weight mode: absolute amplitude difference.
 */
#define SFVG_WEIGHTS_ABSOLUTE 1

typedef enum SfvgStatus {
  SFVG_STATUS_OK = 0,
  SFVG_STATUS_NULL_POINTER = 1,
  SFVG_STATUS_INVALID_ARGUMENT = 2,
  SFVG_STATUS_NON_FINITE = 3,
  SFVG_STATUS_TOO_SHORT = 4,
  SFVG_STATUS_NO_EDGES = 5,
  /**
   * Fisher information is zero or the global SF vanishes.
   */
  SFVG_STATUS_DEGENERATE = 6,
  SFVG_STATUS_BUFFER_TOO_SMALL = 7,
  SFVG_STATUS_PANIC = 99,
} SfvgStatus;

/**
 * Weighted natural visibility graph of one segment.
 */
typedef struct SfvgGraph SfvgGraph;

/**
 * Daily SF_R series of one return series.
 */
typedef struct SfvgRisk SfvgRisk;

typedef struct SfvgEdge {
  size_t i;
  size_t j;
  double w;
} SfvgEdge;

typedef struct SfvgSfPoint {
  double shannon;
  double fisher;
  double sf;
} SfvgSfPoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null after a success.
 * The pointer stays valid until the next call into this library on the same
 * thread.
 */
const char *sfvg_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sfvg_version(void);

/**
 * Builds the visibility graph of `values[0..len]` and stores a new handle in
 * `*out`.
 *
 * # Safety
 * `values` must point to `len` doubles; `out` must be a valid pointer.
 */
enum SfvgStatus sfvg_graph_new(const double *values,
                               size_t len,
                               int32_t weight_mode_,
                               struct SfvgGraph **out);

/**
 * # Safety
 * `graph` must be null or a handle from [`sfvg_graph_new`] not yet freed.
 */
void sfvg_graph_free(struct SfvgGraph *graph);

/**
 * Number of nodes, or 0 for a null handle.
 *
 * # Safety
 * `graph` must be null or a live handle.
 */
size_t sfvg_graph_node_count(const struct SfvgGraph *graph);

/**
 * Number of edges, or 0 for a null handle.
 *
 * # Safety
 * `graph` must be null or a live handle.
 */
size_t sfvg_graph_edge_count(const struct SfvgGraph *graph);

/**
 * Copies the edges, sorted by `(i, j)`, into `buf`, which must hold at least
 * [`sfvg_graph_edge_count`] entries.
 *
 * # Safety
 * `graph` must be a live handle; `buf` must have room for `capacity` edges.
 */
enum SfvgStatus sfvg_graph_edges(const struct SfvgGraph *graph,
                                 struct SfvgEdge *buf,
                                 size_t capacity);

/**
 * SF index of a graph's weight distribution over `bins` bins.
 *
 * # Safety
 * `graph` must be a live handle; `out` must be a valid pointer.
 */
enum SfvgStatus sfvg_graph_sf(const struct SfvgGraph *graph, size_t bins, struct SfvgSfPoint *out);

/**
 * SF index of one segment, binned over its own weight range.
 *
 * # Safety
 * `values` must point to `len` doubles; `out` must be a valid pointer.
 */
enum SfvgStatus sfvg_segment_sf(const double *values,
                                size_t len,
                                size_t bins,
                                int32_t weight_mode_,
                                struct SfvgSfPoint *out);

/**
 * Daily SF_R of a return series with a trailing window of `window` points
 * and default binning. Point `k` covers returns `k .. k + window`.
 *
 * # Safety
 * `returns` must point to `len` doubles; `out` must be a valid pointer.
 */
enum SfvgStatus sfvg_risk_new(const double *returns,
                              size_t len,
                              size_t window,
                              size_t bins,
                              int32_t weight_mode_,
                              struct SfvgRisk **out);

/**
 * # Safety
 * `risk` must be null or a handle from [`sfvg_risk_new`] not yet freed.
 */
void sfvg_risk_free(struct SfvgRisk *risk);

/**
 * Number of SF_R points, or 0 for a null handle.
 *
 * # Safety
 * `risk` must be null or a live handle.
 */
size_t sfvg_risk_len(const struct SfvgRisk *risk);

/**
 * SF of the whole series, the denominator of every SF_R value; NaN for a
 * null handle.
 *
 * # Safety
 * `risk` must be null or a live handle.
 */
double sfvg_risk_global_sf(const struct SfvgRisk *risk);

/**
 * Copies the SF_R values into `buf`; undefined points are written as NaN.
 *
 * # Safety
 * `risk` must be a live handle; `buf` must have room for `capacity` doubles.
 */
enum SfvgStatus sfvg_risk_values(const struct SfvgRisk *risk, double *buf, size_t capacity);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SFVG_H */
