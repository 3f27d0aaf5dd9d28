#ifndef WAVEPATH_H
#define WAVEPATH_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WpOutcome {
  WP_OUTCOME_RUNNING = 0,
  WP_OUTCOME_REACHED = 1,
  WP_OUTCOME_STEP_BUDGET_EXHAUSTED = 2,
  WP_OUTCOME_BUMP_LOST = 3,
} WpOutcome;

typedef enum WpStatus {
  WP_STATUS_OK = 0,
  WP_STATUS_NULL_POINTER = -1,
  WP_STATUS_INVALID_UTF8 = -2,
  WP_STATUS_CONFIG = -3,
  WP_STATUS_NUMERICAL = -4,
  WP_STATUS_PANIC = -5,
  WP_STATUS_UNSUPPORTED = -6,
  WP_STATUS_INTERNAL = -255,
} WpStatus;

// Planner state. Create with `wp_planner_new`, release with `wp_planner_free`.
typedef struct WpPlanner WpPlanner;

typedef struct WpSummary {
  enum WpOutcome outcome;
  uint64_t steps;
  uint64_t wavefronts;
  double path_length;
} WpSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failing call on this thread, or NULL. The pointer
// stays valid until the next failing call on the same thread.
const char *wp_last_error(void);

// Library version as a static NUL-terminated string.
const char *wp_version(void);

// Build a planner from scenario JSON (a plan task). Warm-up runs here.
//
// # Safety
// `config_json` must be a NUL-terminated string; `out` must be writable.
enum WpStatus wp_planner_new(const char *config_json, struct WpPlanner **out);

// Advance one step and report where the run stands.
//
// # Safety
// `planner` must come from `wp_planner_new`; `outcome` may be NULL.
enum WpStatus wp_planner_step(struct WpPlanner *planner, enum WpOutcome *outcome);

// Current bump center in lattice coordinates.
//
// # Safety
// `planner` must come from `wp_planner_new`; `x` and `y` must be writable.
enum WpStatus wp_planner_bump_center(const struct WpPlanner *planner, uint32_t *x, uint32_t *y);

// Step until the run ends and fill `summary`.
//
// # Safety
// `planner` must come from `wp_planner_new`; `summary` must be writable.
enum WpStatus wp_planner_run(struct WpPlanner *planner, struct WpSummary *summary);

// Release a planner. NULL is ignored.
//
// # Safety
// `planner` must come from `wp_planner_new` and not be used afterwards.
void wp_planner_free(struct WpPlanner *planner);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WAVEPATH_H */
