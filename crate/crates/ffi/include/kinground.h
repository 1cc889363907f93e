#ifndef KINGROUND_H
#define KINGROUND_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum KgStatus {
  KG_STATUS_OK = 0,
  KG_STATUS_NULL_POINTER = 1,
  KG_STATUS_INVALID_UTF8 = 2,
  /**
   * Input failed validation or an argument was out of range.
   */
  KG_STATUS_INVALID = 3,
  KG_STATUS_IO = 4,
  KG_STATUS_NOT_FOUND = 5,
  KG_STATUS_PANIC = 6,
} KgStatus;

/**
 * A parsed, validated scene manifest.
 */
typedef struct KgManifest KgManifest;

/**
 * An object trajectory on the 0.5 s grid.
 */
typedef struct KgTrajectory KgTrajectory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *kg_last_error_message(void);

/**
 * # Safety
 * `path` must be a nul-terminated string; `out` must be writable.
 */
enum KgStatus kg_manifest_read(const char *path, struct KgManifest **out);

/**
 * # Safety
 * `json` must be a nul-terminated string; `out` must be writable.
 */
enum KgStatus kg_manifest_parse(const char *json, struct KgManifest **out);

/**
 * # Safety
 * `m` must come from `kg_manifest_read`/`kg_manifest_parse` or be null.
 */
void kg_manifest_free(struct KgManifest *m);

/**
 * # Safety
 * `m` must be a live manifest handle; `out` must be writable.
 */
enum KgStatus kg_manifest_object_count(const struct KgManifest *m, size_t *out);

/**
 * Copies the id of object `index` into `buf` (nul-terminated, truncated to
 * `len` bytes) and stores the full length, without the nul, in `needed`.
 *
 * # Safety
 * `m` must be a live handle; `buf` must hold `len` bytes or be null with
 * `len` 0; `needed` may be null.
 */
enum KgStatus kg_manifest_object_id(const struct KgManifest *m,
                                    size_t index,
                                    char *buf,
                                    size_t len,
                                    size_t *needed);

/**
 * Resamples one object of a manifest onto the grid with default settings.
 *
 * # Safety
 * `m` must be a live handle, `object_id` a nul-terminated string and
 * `out` writable.
 */
enum KgStatus kg_manifest_trajectory(const struct KgManifest *m,
                                     const char *object_id,
                                     struct KgTrajectory **out);

/**
 * Builds a trajectory from `n` positions laid out as x, y, z triples, the
 * first at grid time `first_index * 0.5` s.
 *
 * # Safety
 * `xyz` must point to `3 * n` doubles; `out` must be writable.
 */
enum KgStatus kg_trajectory_new(const double *xyz,
                                size_t n,
                                int64_t first_index,
                                struct KgTrajectory **out);

/**
 * # Safety
 * `t` must come from a trajectory constructor or be null.
 */
void kg_trajectory_free(struct KgTrajectory *t);

/**
 * # Safety
 * `t` must be a live handle; outputs must be writable.
 */
enum KgStatus kg_trajectory_span(const struct KgTrajectory *t, double *start, double *end);

/**
 * Sum of chord lengths between grid times `s` and `e`, meters. Both must
 * lie on the trajectory's grid.
 *
 * # Safety
 * `t` must be a live handle; `out` must be writable.
 */
enum KgStatus kg_traveled_distance(const struct KgTrajectory *t, double s, double e, double *out);

/**
 * # Safety
 * `t` must be a live handle; `out` must be writable.
 */
enum KgStatus kg_total_distance(const struct KgTrajectory *t, double *out);

/**
 * Average speed between grid times `s` and `e`, km/h.
 *
 * # Safety
 * `t` must be a live handle; `out` must be writable.
 */
enum KgStatus kg_speed_kmh(const struct KgTrajectory *t, double s, double e, double *out);

/**
 * Clock hour (1 to 12) of the step starting at grid time `time`, relative
 * to the first displacement; 0 when the step is stationary.
 *
 * # Safety
 * `t` must be a live handle; `out` must be writable.
 */
enum KgStatus kg_direction_hour(const struct KgTrajectory *t, double time, uint8_t *out);

/**
 * Clock hour of a clockwise angle in degrees.
 */
uint8_t kg_clock_from_angle(double angle_deg);

/**
 * # Safety
 * Outputs must be writable.
 */
enum KgStatus kg_score_scalar(double y, double yhat, bool *correct, double *abs_err);

/**
 * # Safety
 * Outputs must be writable.
 */
enum KgStatus kg_score_clock(uint8_t y, uint8_t yhat, bool *correct, uint8_t *err);

/**
 * # Safety
 * Outputs must be writable.
 */
enum KgStatus kg_score_interval(double y_start,
                                double y_end,
                                double yhat_start,
                                double yhat_end,
                                bool *correct,
                                double *iou);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KINGROUND_H */
