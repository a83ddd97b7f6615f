#ifndef SIGCOM_H
#define SIGCOM_H

/* Generated by cbindgen from sigcom-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Success.
#define SIGCOM_OK 0

// Invalid configuration or argument (bad threshold, label count, method id…).
#define SIGCOM_ERR_CONFIG 2

// Input data failed validation (non-finite, asymmetric, empty…).
#define SIGCOM_ERR_DATA 3

// A numeric routine failed or an internal invariant broke.
#define SIGCOM_ERR_NUMERIC 4

// A required pointer argument was null.
#define SIGCOM_ERR_NULL 5

// Fiedler-vector bisection, postponing by normalized algebraic connectivity.
#define SIGCOM_METHOD_A 0

// Spectral coordinates of the signed adjacency, clustered with k-means.
#define SIGCOM_METHOD_B 1

// Edge-betweenness removal with inverse-weight path lengths.
#define SIGCOM_METHOD_C 2

// Hierarchical simulated annealing on signed modularity.
#define SIGCOM_METHOD_D 3

// Anticorrelation index: negative weight mass over total weight mass.
#define SIGCOM_ANTICORR_WEIGHTED 0

// Anticorrelation index: negative edge count over total edge count.
#define SIGCOM_ANTICORR_COUNT 1

// A signed graph built from one connectivity matrix.
typedef struct SigcomGraph SigcomGraph;

// One method's dendrogram: scored levels plus the index of the chosen one.
typedef struct SigcomReport SigcomReport;

// Library version as a static nul-terminated string.
const char *sigcom_version(void);

// Message of the most recent failure on this thread, or null if no call has
// failed yet. The pointer is invalidated by the next failing call.
const char *sigcom_last_error_message(void);

// Builds a signed graph from an `n * n` row-major symmetric matrix of
// correlation values in [-1, 1]. The diagonal is ignored; off-diagonal
// entries with |value| <= threshold are dropped, the rest become edges with
// weight |value| and the value's sign.
//
// # Safety
// `values` must point to `n * n` readable doubles; `out` must be a valid
// destination for one pointer.
int32_t sigcom_graph_from_matrix(const double *values,
                                 size_t n,
                                 double threshold,
                                 struct SigcomGraph **out);

// Frees a graph handle. Null is allowed.
//
// # Safety
// `g` must be a pointer returned by [`sigcom_graph_from_matrix`] that has
// not been freed yet, or null.
void sigcom_graph_free(struct SigcomGraph *g);

// Number of vertices.
//
// # Safety
// `g` must be a live graph handle; `out` must be writable.
int32_t sigcom_graph_order(const struct SigcomGraph *g, size_t *out);

// Number of edges that survived the threshold.
//
// # Safety
// `g` must be a live graph handle; `out` must be writable.
int32_t sigcom_graph_edge_count(const struct SigcomGraph *g, size_t *out);

// Anticorrelation index of the underlying matrix; `mode` is one of the
// `SIGCOM_ANTICORR_*` constants.
//
// # Safety
// `g` must be a live graph handle; `out` must be writable.
int32_t sigcom_anticorrelation_index(const struct SigcomGraph *g, int32_t mode, double *out);

// Signed modularity of a vertex labeling. `labels` holds one cluster label
// per vertex (arbitrary values; equal label means same cluster).
//
// # Safety
// `g` must be a live graph handle; `labels` must point to `n_labels`
// readable values; `out` must be writable.
int32_t sigcom_signed_modularity(const struct SigcomGraph *g,
                                 const uint32_t *labels,
                                 size_t n_labels,
                                 double *out);

// Runs one community-detection method; `method` is one of the
// `SIGCOM_METHOD_*` constants. `seed` feeds the methods that randomize
// (B and D) and is ignored by the deterministic ones.
//
// # Safety
// `g` must be a live graph handle; `out` must be a valid destination for
// one pointer.
int32_t sigcom_run_method(const struct SigcomGraph *g,
                          int32_t method,
                          uint64_t seed,
                          struct SigcomReport **out);

// Frees a report handle. Null is allowed.
//
// # Safety
// `r` must be a pointer returned by [`sigcom_run_method`] that has not been
// freed yet, or null.
void sigcom_report_free(struct SigcomReport *r);

// Number of dendrogram levels in the report.
//
// # Safety
// `r` must be a live report handle; `out` must be writable.
int32_t sigcom_report_level_count(const struct SigcomReport *r, size_t *out);

// Index of the chosen level (maximum signed modularity; ties go to the
// level with fewer clusters).
//
// # Safety
// `r` must be a live report handle; `out` must be writable.
int32_t sigcom_report_chosen_level(const struct SigcomReport *r, size_t *out);

// Cluster count of one level.
//
// # Safety
// `r` must be a live report handle; `out` must be writable.
int32_t sigcom_report_level_k(const struct SigcomReport *r, size_t level, size_t *out);

// Signed modularity of one level.
//
// # Safety
// `r` must be a live report handle; `out` must be writable.
int32_t sigcom_report_level_modularity(const struct SigcomReport *r, size_t level, double *out);

// Writes one level's vertex labeling (0-based cluster ids, one per vertex)
// into `labels_out`. `capacity` is the writable length of `labels_out` and
// must be at least the vertex count.
//
// # Safety
// `r` must be a live report handle; `labels_out` must point to `capacity`
// writable values.
int32_t sigcom_report_level_assignment(const struct SigcomReport *r,
                                       size_t level,
                                       uint32_t *labels_out,
                                       size_t capacity);

// Size of the search space a divisive hierarchy explores on `n` vertices:
// the best case (every split lands immediately), the worst case (splits
// peel one vertex at a time), and the exhaustive reference (the number of
// all partitions). Fails for `n > 25`, where the reference count no longer
// fits in 64 bits.
//
// # Safety
// The three out-pointers must be writable.
int32_t sigcom_search_space(size_t n,
                            uint64_t *best_out,
                            uint64_t *worst_out,
                            uint64_t *exhaustive_out);

#endif /* SIGCOM_H */
