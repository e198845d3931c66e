#ifndef ORAL_BILLIARDS_H
#define ORAL_BILLIARDS_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ObStatus {
  OB_STATUS_OK = 0,
  OB_STATUS_NULL_POINTER = 1,
  OB_STATUS_INVALID_ARGUMENT = 2,
  OB_STATUS_GEOMETRY = 3,
  OB_STATUS_SIMULATION = 4,
  OB_STATUS_GRAMMAR_REJECTED = 5,
  OB_STATUS_PANIC = 6,
} ObStatus;

typedef enum ObTermination {
  OB_TERMINATION_MAX_EVENTS = 0,
  OB_TERMINATION_CORNER_HIT = 1,
  OB_TERMINATION_ENERGY_FLOOR = 2,
} ObTermination;

/**
 * A billiard table.
 */
typedef struct ObTable ObTable;

/**
 * A finished trajectory.
 */
typedef struct ObTrajectory ObTrajectory;

/**
 * One collision.
 */
typedef struct ObEvent {
  size_t side;
  double s;
  double x;
  double y;
  double dx_out;
  double dy_out;
  double speed_out;
  double flight_length;
} ObEvent;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until the
 * next call into the library from the same thread.
 */
const char *ob_last_error_message(void);

/**
 * `s` must come from this library or be null.
 */
void ob_string_free(char *s);

/**
 * Reference oral polygon with a jaw line of `scale` cm (6 to 10).
 *
 * `out` must be a valid pointer.
 */
enum ObStatus ob_polygon_default(double scale, struct ObTable **out);

/**
 * Oral polygon from a JSON configuration.
 *
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum ObStatus ob_polygon_from_json(const char *json, struct ObTable **out);

/**
 * Convex table from `n` counterclockwise vertices given as `xy[2i], xy[2i+1]`;
 * sides are labelled a, b, c, ...
 *
 * `xy` must point to `2 * n` doubles and `out` must be valid.
 */
enum ObStatus ob_table_new(const double *xy, size_t n, struct ObTable **out);

/**
 * `t` must come from this library or be null.
 */
void ob_polygon_free(struct ObTable *t);

/**
 * `t` and `out` must be valid pointers.
 */
enum ObStatus ob_polygon_side_count(const struct ObTable *t, size_t *out);

/**
 * Label of side `side`, as a new string.
 *
 * `t` and `out` must be valid pointers.
 */
enum ObStatus ob_polygon_side_label(const struct ObTable *t, size_t side, char **out);

/**
 * Conservative point-ball run launched from arc length `s` on `side` at
 * `angle` radians from the side's tangent. `eps_corner <= 0` selects the
 * default corner tolerance.
 *
 * `t` and `out` must be valid pointers.
 */
enum ObStatus ob_simulate(const struct ObTable *t,
                          size_t side,
                          double s,
                          double angle,
                          size_t max_events,
                          double eps_corner,
                          struct ObTrajectory **out);

/**
 * `tr` must come from this library or be null.
 */
void ob_trajectory_free(struct ObTrajectory *tr);

/**
 * `tr` and `out` must be valid pointers.
 */
enum ObStatus ob_trajectory_event_count(const struct ObTrajectory *tr, size_t *out);

/**
 * `tr` and `out` must be valid pointers.
 */
enum ObStatus ob_trajectory_event(const struct ObTrajectory *tr, size_t index, struct ObEvent *out);

/**
 * `tr` and `out` must be valid pointers.
 */
enum ObStatus ob_trajectory_termination(const struct ObTrajectory *tr, enum ObTermination *out);

/**
 * Side labels hit, separated by single spaces.
 *
 * `tr` and `out` must be valid pointers; free the result with `ob_string_free`.
 */
enum ObStatus ob_trajectory_word(const struct ObTrajectory *tr, char **out);

/**
 * The JSONL event log.
 *
 * `tr` and `out` must be valid pointers; free the result with `ob_string_free`.
 */
enum ObStatus ob_trajectory_jsonl(const struct ObTrajectory *tr, char **out);

/**
 * Validate whitespace-separated `symbol/M` phones. On success writes the
 * syllable count; on `GrammarRejected` writes the offending token index
 * (or `SIZE_MAX` when the error has none).
 *
 * `phones` must be a NUL-terminated string; the out pointers may be null.
 */
enum ObStatus ob_grammar_validate(const char *phones, size_t *syllables, size_t *error_index);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ORAL_BILLIARDS_H */
