#ifndef RELMAP_H
#define RELMAP_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of every call.
 */
typedef enum RelmapStatus {
  RELMAP_STATUS_OK = 0,
  RELMAP_STATUS_NULL_POINTER = 1,
  RELMAP_STATUS_INVALID_ARGUMENT = 2,
  RELMAP_STATUS_INVALID_CONFIG = 3,
  RELMAP_STATUS_OUT_OF_RANGE = 4,
  RELMAP_STATUS_NO_ACTIVE_PART = 5,
  RELMAP_STATUS_UNKNOWN_NODE = 6,
  RELMAP_STATUS_NO_GRID_LOCATION = 7,
  RELMAP_STATUS_NO_CANDIDATE = 8,
  RELMAP_STATUS_NO_RELATION = 9,
  RELMAP_STATUS_PATTERN_SPACE_EXHAUSTED = 10,
  RELMAP_STATUS_SCHEMA = 11,
  RELMAP_STATUS_RUNTIME = 12,
  RELMAP_STATUS_PANIC = 13,
} RelmapStatus;

/**
 * How a prediction chose among grid-consistent cells.
 */
typedef enum RelmapResolution {
  RELMAP_RESOLUTION_EDGE = 0,
  RELMAP_RESOLUTION_CONTINUITY = 1,
  RELMAP_RESOLUTION_FALLBACK = 2,
} RelmapResolution;

/**
 * Opaque engine handle.
 */
typedef struct RelmapEngine RelmapEngine;

/**
 * Object-vector cell.
 */
typedef struct RelmapOvcCell {
  uint32_t dir_bin;
  uint32_t ring;
} RelmapOvcCell;

typedef struct RelmapObserveResult {
  uint32_t node;
  struct RelmapOvcCell ovc;
  bool node_allocated;
  bool edge_learned;
} RelmapObserveResult;

typedef struct RelmapMoveResult {
  size_t candidate_count;
  bool range_exceeded;
} RelmapMoveResult;

typedef struct RelmapPrediction {
  uint32_t node;
  struct RelmapOvcCell ovc;
  double vector_x;
  double vector_y;
  size_t candidates_considered;
  enum RelmapResolution resolved_by;
} RelmapPrediction;

/**
 * The represented part, if any.
 */
typedef struct RelmapActive {
  bool has_active;
  uint32_t node;
  struct RelmapOvcCell ovc;
} RelmapActive;

/**
 * Displacement bin; `dir_bin` and `ring` are meaningless when `is_zero`.
 */
typedef struct RelmapDispBin {
  bool is_zero;
  uint32_t dir_bin;
  uint32_t ring;
} RelmapDispBin;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty if none. Valid
 * until the next failing call on the same thread.
 */
const char *relmap_last_error_message(void);

/**
 * Library version, static.
 */
const char *relmap_version(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string from this library not yet freed.
 */
void relmap_string_free(char *s);

/**
 * Creates an engine. `config_json` may be null for the defaults; otherwise
 * it is a JSON config object (missing fields take defaults).
 *
 * # Safety
 * `config_json` must be null or nul-terminated; `out` valid for writes.
 */
enum RelmapStatus relmap_engine_new(const char *config_json,
                                    uint64_t seed,
                                    struct RelmapEngine **out);

/**
 * Destroys an engine. Null is ignored.
 *
 * # Safety
 * `e` must be null or a handle not yet freed.
 */
void relmap_engine_free(struct RelmapEngine *e);

/**
 * Sets the head-direction estimate, radians counterclockwise from +x.
 *
 * # Safety
 * `e` must be a live handle.
 */
enum RelmapStatus relmap_engine_set_heading(struct RelmapEngine *e, double angle);

/**
 * Senses a part at egocentric `(forward, left)` whose descriptor has the
 * given active bits.
 *
 * # Safety
 * `e` must be a live handle; `bits` valid for `n_bits` reads; `out` valid
 * for writes.
 */
enum RelmapStatus relmap_engine_observe(struct RelmapEngine *e,
                                        double forward,
                                        double left,
                                        const uint16_t *bits,
                                        size_t n_bits,
                                        uint32_t environment,
                                        struct RelmapObserveResult *out);

/**
 * Self-motion by egocentric `(forward, left)`, then a counterclockwise turn.
 *
 * # Safety
 * `e` must be a live handle; `out` null or valid for writes.
 */
enum RelmapStatus relmap_engine_path_integrate(struct RelmapEngine *e,
                                               double forward,
                                               double left,
                                               double turn,
                                               struct RelmapMoveResult *out);

/**
 * Predicts the cell that attending `node` would activate. No state change.
 *
 * # Safety
 * `e` must be a live handle; `out` valid for writes.
 */
enum RelmapStatus relmap_engine_predict(const struct RelmapEngine *e,
                                        uint32_t node,
                                        struct RelmapPrediction *out);

/**
 * Moves attention to `node`, activating the predicted cell.
 *
 * # Safety
 * `e` must be a live handle; `out` null or valid for writes.
 */
enum RelmapStatus relmap_engine_shift_attention(struct RelmapEngine *e,
                                                uint32_t node,
                                                struct RelmapPrediction *out);

/**
 * # Safety
 * `e` must be a live handle; `out` valid for writes.
 */
enum RelmapStatus relmap_engine_active(const struct RelmapEngine *e, struct RelmapActive *out);

/**
 * Offline consolidation; writes the number of pairs that gained an edge.
 *
 * # Safety
 * `e` must be a live handle; `added` null or valid for writes.
 */
enum RelmapStatus relmap_engine_consolidate(struct RelmapEngine *e,
                                            size_t hop_limit,
                                            size_t *added);

/**
 * # Safety
 * `e` must be a live handle; outputs null or valid for writes.
 */
enum RelmapStatus relmap_engine_graph_size(const struct RelmapEngine *e,
                                           size_t *nodes,
                                           size_t *edges);

/**
 * Position of part `to` relative to part `from`, decoded from the graph's
 * coarse edges and the stored grid cells.
 *
 * # Safety
 * `e` must be a live handle; `x` and `y` valid for writes.
 */
enum RelmapStatus relmap_engine_decode_part(const struct RelmapEngine *e,
                                            uint32_t from,
                                            uint32_t to,
                                            double *x,
                                            double *y);

/**
 * The graph as JSON when `json` is true, Graphviz DOT otherwise.
 * Free the result with [`relmap_string_free`].
 *
 * # Safety
 * `e` must be a live handle; `out` valid for writes.
 */
enum RelmapStatus relmap_engine_export(const struct RelmapEngine *e, bool json, char **out);

/**
 * Object-vector cell of an allocentric vector under the engine's code.
 *
 * # Safety
 * `e` must be a live handle; `out` valid for writes.
 */
enum RelmapStatus relmap_engine_encode_ovc(const struct RelmapEngine *e,
                                           double dx,
                                           double dy,
                                           struct RelmapOvcCell *out);

/**
 * Displacement bin of an allocentric vector under the engine's code.
 *
 * # Safety
 * `e` must be a live handle; `out` valid for writes.
 */
enum RelmapStatus relmap_engine_encode_disp(const struct RelmapEngine *e,
                                            double dx,
                                            double dy,
                                            struct RelmapDispBin *out);

/**
 * Runs a scenario file and writes its artifacts into `out_dir`.
 * `exit_code` receives 0 when every assertion held, 1 otherwise. Schema
 * and runtime failures are reported through the status.
 *
 * # Safety
 * `path` and `out_dir` must be nul-terminated; `exit_code` null or valid
 * for writes.
 */
enum RelmapStatus relmap_run_scenario(const char *path, const char *out_dir, int32_t *exit_code);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RELMAP_H */
