#ifndef RLW_H
#define RLW_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum RlwStatus {
  RLW_STATUS_OK = 0,
  RLW_STATUS_NULL_ARGUMENT = 1,
  RLW_STATUS_PARSE = 2,
  RLW_STATUS_IO = 3,
  RLW_STATUS_DOMAIN = 4,
  RLW_STATUS_MISSING_DATA = 5,
  RLW_STATUS_ADMISSIBILITY = 6,
  RLW_STATUS_NO_PROBE = 7,
  RLW_STATUS_DIMENSION_CAP = 8,
  RLW_STATUS_NUMERICAL = 9,
  RLW_STATUS_TOPOLOGY = 10,
  RLW_STATUS_OTHER = 11,
  RLW_STATUS_PANIC = 12,
} RlwStatus;

/**
 * Local data handle.
 */
typedef struct RlwData RlwData;

/**
 * Ribbon graph handle.
 */
typedef struct RlwGraph RlwGraph;

/**
 * Outcome of [`rlw_data_validate`].
 */
typedef struct RlwValidation {
  bool passed;
  size_t checks;
  size_t failed;
  double max_residual;
} RlwValidation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *rlw_last_error(void);

/**
 * Builds data from a family selector such as `P:3:2` or `F:2:1:2`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` a writable pointer.
 */
enum RlwStatus rlw_data_from_family(const char *spec, struct RlwData **out);

/**
 * Loads a data file (table or family selector).
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a writable pointer.
 */
enum RlwStatus rlw_data_from_file(const char *path, struct RlwData **out);

/**
 * # Safety
 * `data` must come from an `rlw_data_*` constructor and not be used afterwards.
 */
void rlw_data_free(struct RlwData *data);

/**
 * Runs the axiom suite over the closure of a comma-separated degree list.
 *
 * # Safety
 * Pointers must be valid; `out` must be writable.
 */
enum RlwStatus rlw_data_validate(const struct RlwData *data,
                                 const char *degrees,
                                 double tol,
                                 struct RlwValidation *out);

/**
 * Builds a surface from `torus:theta`, `torus:grid:N` or `genus:G`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` a writable pointer.
 */
enum RlwStatus rlw_graph_from_spec(const char *spec, struct RlwGraph **out);

/**
 * # Safety
 * `graph` must come from [`rlw_graph_from_spec`] and not be used afterwards.
 */
void rlw_graph_free(struct RlwGraph *graph);

/**
 * Writes vertex, edge and plaquette counts and the genus into `counts[0..4]`.
 *
 * # Safety
 * `counts` must point to four writable `size_t`.
 */
enum RlwStatus rlw_graph_counts(const struct RlwGraph *graph, size_t *counts);

/**
 * Ground-state degeneracy for the coloring with the given holonomies
 * (comma-separated, one per basis cycle), using automatic probes.
 *
 * # Safety
 * Pointers must be valid; `dim` must be writable.
 */
enum RlwStatus rlw_ground_dim(const struct RlwData *data,
                              const struct RlwGraph *graph,
                              const char *holonomy,
                              bool strict_fusion,
                              double tol,
                              size_t *dim);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RLW_H */
