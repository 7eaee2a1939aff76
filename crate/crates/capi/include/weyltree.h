/* C interface of the weyltree library. Generated by cbindgen; do not edit. */

#ifndef WEYLTREE_H
#define WEYLTREE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code of every fallible call.
 */
typedef enum WtStatus {
  WT_STATUS_OK = 0,
  WT_STATUS_NULL_ARGUMENT = 1,
  WT_STATUS_INVALID_ARGUMENT = 2,
  WT_STATUS_PARSE_ERROR = 3,
  WT_STATUS_VALIDATION_ERROR = 4,
  /**
   * lambda sits on (or numerically too close to) a Dirichlet eigenvalue
   * of the tree or of an intermediate subtree.
   */
  WT_STATUS_SINGULAR = 5,
  WT_STATUS_DIMENSION_MISMATCH = 6,
  WT_STATUS_IO_ERROR = 7,
  /**
   * An internal invariant failed; the handle is still valid.
   */
  WT_STATUS_PANIC = 8,
} WtStatus;

/**
 * A parsed and validated metric tree.
 */
typedef struct WtTree WtTree;

/**
 * A Weyl matrix together with the smallest reciprocal-condition estimate
 * met while computing it.
 */
typedef struct WtWeyl WtWeyl;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the most recent failure on this thread. Never null; empty
 * when the last call succeeded. Valid until the next `wt_` call on the
 * same thread.
 */
const char *wt_last_error(void);

/**
 * Library version as a static string.
 */
const char *wt_version(void);

/**
 * Parse a graph description (the same line format the CLI reads) and
 * validate it. On success `*out` owns the new tree.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum WtStatus wt_tree_parse_string(const char *text, struct WtTree **out);

/**
 * Read and parse a graph file.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum WtStatus wt_tree_parse_file(const char *path, struct WtTree **out);

/**
 * Release a tree handle. Passing null is a no-op.
 *
 * # Safety
 * `tree` must be null or a pointer previously returned by a constructor
 * and not yet freed.
 */
void wt_tree_free(struct WtTree *tree);

/**
 * Number of edges, 0 for null.
 *
 * # Safety
 * `tree` must be null or a live tree handle.
 */
size_t wt_tree_edge_count(const struct WtTree *tree);

/**
 * Number of leaves, 0 for null.
 *
 * # Safety
 * `tree` must be null or a live tree handle.
 */
size_t wt_tree_leaf_count(const struct WtTree *tree);

/**
 * Copy up to `capacity` leaf ids (ascending) into `out`; `*written`
 * receives the total leaf count, which may exceed `capacity`.
 *
 * # Safety
 * `tree` must be a live tree handle, `out` must point to `capacity`
 * writable u64 slots, `written` must be a valid pointer.
 */
enum WtStatus wt_tree_leaves(const struct WtTree *tree,
                             uint64_t *out,
                             size_t capacity,
                             size_t *written);

/**
 * Weyl matrix by incremental synthesis at rho = rho_re + i rho_im.
 * `root_leaf < 0` picks the smallest leaf id; `steps_per_unit <= 0` keeps
 * the default integration density.
 *
 * # Safety
 * `tree` must be a live tree handle and `out` a valid pointer.
 */
enum WtStatus wt_weyl_synthesize(const struct WtTree *tree,
                                 double rho_re,
                                 double rho_im,
                                 int64_t root_leaf,
                                 double steps_per_unit,
                                 struct WtWeyl **out);

/**
 * Weyl matrix by direct global assembly; the independent reference path.
 *
 * # Safety
 * `tree` must be a live tree handle and `out` a valid pointer.
 */
enum WtStatus wt_weyl_direct(const struct WtTree *tree,
                             double rho_re,
                             double rho_im,
                             double steps_per_unit,
                             struct WtWeyl **out);

/**
 * Release a matrix handle. Passing null is a no-op.
 *
 * # Safety
 * `weyl` must be null or a pointer previously returned by a constructor
 * and not yet freed.
 */
void wt_weyl_free(struct WtWeyl *weyl);

/**
 * Matrix dimension (leaf count), 0 for null.
 *
 * # Safety
 * `weyl` must be null or a live matrix handle.
 */
size_t wt_weyl_dim(const struct WtWeyl *weyl);

/**
 * Smallest reciprocal-condition estimate met while computing the matrix.
 *
 * # Safety
 * `weyl` must be null or a live matrix handle.
 */
double wt_weyl_min_rcond(const struct WtWeyl *weyl);

/**
 * The lambda the matrix was evaluated at.
 *
 * # Safety
 * All pointers must be valid; `weyl` must be a live matrix handle.
 */
enum WtStatus wt_weyl_lambda(const struct WtWeyl *weyl, double *re, double *im);

/**
 * Leaf ids labelling the rows and columns, like `wt_tree_leaves`.
 *
 * # Safety
 * `weyl` must be a live matrix handle, `out` must point to `capacity`
 * writable u64 slots, `written` must be a valid pointer.
 */
enum WtStatus wt_weyl_leaves(const struct WtWeyl *weyl,
                             uint64_t *out,
                             size_t capacity,
                             size_t *written);

/**
 * One entry, row `i`, column `j`.
 *
 * # Safety
 * All pointers must be valid; `weyl` must be a live matrix handle.
 */
enum WtStatus wt_weyl_entry(const struct WtWeyl *weyl, size_t i, size_t j, double *re, double *im);

/**
 * Copy the whole matrix into `out` as row-major interleaved re, im pairs;
 * `capacity_doubles` must be at least `2 * dim * dim`.
 *
 * # Safety
 * `weyl` must be a live matrix handle and `out` must point to
 * `capacity_doubles` writable doubles.
 */
enum WtStatus wt_weyl_entries(const struct WtWeyl *weyl, double *out, size_t capacity_doubles);

/**
 * Largest relative entry deviation between two matrices over the same
 * leaves at the same lambda.
 *
 * # Safety
 * `a` and `b` must be live matrix handles and `out` a valid pointer.
 */
enum WtStatus wt_weyl_compare(const struct WtWeyl *a, const struct WtWeyl *b, double *out);

/**
 * Apply the Dirichlet-to-Neumann map. `f` and `out` are interleaved re, im
 * pairs in canonical leaf order; `len_doubles` counts doubles in `f` and
 * must equal `2 * dim`.
 *
 * # Safety
 * `weyl` must be a live matrix handle; `f` and `out` must point to
 * `len_doubles` readable/writable doubles respectively.
 */
enum WtStatus wt_dtn_apply(const struct WtWeyl *weyl,
                           const double *f,
                           size_t len_doubles,
                           double *out);

/**
 * Scan `[lambda_min, lambda_max]` for Dirichlet eigenvalues on a grid of
 * `grid_points`. Up to `capacity` results are copied into `out`;
 * `*written` receives the number found (which may exceed `capacity`).
 *
 * # Safety
 * `tree` must be a live tree handle, `out` must point to `capacity`
 * writable doubles, `written` must be a valid pointer.
 */
enum WtStatus wt_spectrum_scan(const struct WtTree *tree,
                               double lambda_min,
                               double lambda_max,
                               size_t grid_points,
                               double steps_per_unit,
                               double *out,
                               size_t capacity,
                               size_t *written);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WEYLTREE_H */
