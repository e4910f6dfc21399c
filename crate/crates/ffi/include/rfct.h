#ifndef RFCT_H
#define RFCT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Number of entries in `RfctMetrics.precision`.
 */
#define RFCT_PRECISION_POINTS 51

/**
 * Number of entries in `RfctMetrics.success`.
 */
#define RFCT_SUCCESS_POINTS 21

typedef enum RfctStatus {
  RFCT_STATUS_OK = 0,
  RFCT_STATUS_NULL_POINTER = 1,
  RFCT_STATUS_INVALID_INPUT = 2,
  RFCT_STATUS_CONFIG = 3,
  RFCT_STATUS_TRACKING_STATE = 4,
  RFCT_STATUS_INIT = 5,
  RFCT_STATUS_IO = 6,
  /**
   * A string argument was not valid UTF-8.
   */
  RFCT_STATUS_UTF8 = 7,
  /**
   * A Rust panic was caught at the boundary. The handle involved should
   * be freed and not used again.
   */
  RFCT_STATUS_PANIC = 8,
} RfctStatus;

/**
 * Opaque tracker configuration.
 */
typedef struct RfctConfig RfctConfig;

/**
 * Opaque tracker instance.
 */
typedef struct RfctTracker RfctTracker;

/**
 * Axis-aligned box, 0-indexed pixel coordinates of the top-left corner.
 */
typedef struct RfctBox {
  double x;
  double y;
  double w;
  double h;
} RfctBox;

typedef struct RfctMetrics {
  /**
   * Precision at 20 px.
   */
  double dp20;
  /**
   * Success at overlap 0.5.
   */
  double op50;
  /**
   * Area under the success curve.
   */
  double auc;
  /**
   * Frames that had valid ground truth.
   */
  size_t frames;
  /**
   * Precision at thresholds 0, 1, .., 50 px.
   */
  double precision[RFCT_PRECISION_POINTS];
  /**
   * Success at thresholds 0, 0.05, .., 1.
   */
  double success[RFCT_SUCCESS_POINTS];
} RfctMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null if the last
 * call succeeded. Valid until the next rfct call on the same thread.
 */
const char *rfct_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *rfct_version(void);

/**
 * Creates a configuration holding the default parameters.
 */
struct RfctConfig *rfct_config_new(void);

/**
 * Reads a `key = value` configuration file into `*out`.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum RfctStatus rfct_config_load(const char *path, struct RfctConfig **out);

/**
 * Sets one parameter by its configuration-file key, e.g. `"lambda"` or
 * `"map.kind"`. The value is parsed and validated immediately; on error the
 * configuration is unchanged.
 *
 * # Safety
 * `config` must come from this library; `key` and `value` must be
 * NUL-terminated strings.
 */
enum RfctStatus rfct_config_set(struct RfctConfig *config, const char *key, const char *value);

/**
 * The configuration in file form, one `key = value` line per parameter.
 * Returns null if `config` is null. Release with `rfct_string_free`.
 *
 * # Safety
 * `config` must come from this library or be null.
 */
char *rfct_config_to_text(const struct RfctConfig *config);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void rfct_string_free(char *s);

/**
 * # Safety
 * `config` must come from this library or be null.
 */
void rfct_config_free(struct RfctConfig *config);

/**
 * Starts tracking `init` in the first frame. `pixels` is row-major,
 * `channels` is 1 (gray) or 3 (RGB) bytes per pixel with no row padding.
 * A null `config` uses the defaults.
 *
 * # Safety
 * `pixels` must point to `width * height * channels` bytes; `out` must be a
 * valid pointer; `config` must come from this library or be null.
 */
enum RfctStatus rfct_tracker_new(const struct RfctConfig *config,
                                 const uint8_t *pixels,
                                 size_t width,
                                 size_t height,
                                 size_t channels,
                                 struct RfctBox init,
                                 struct RfctTracker **out);

/**
 * Tracks into the next frame and writes the new box to `out`.
 *
 * # Safety
 * As for `rfct_tracker_new`; `tracker` must come from this library.
 */
enum RfctStatus rfct_tracker_step(struct RfctTracker *tracker,
                                  const uint8_t *pixels,
                                  size_t width,
                                  size_t height,
                                  size_t channels,
                                  struct RfctBox *out);

/**
 * Current box, scale factor and number of frames processed. Any output
 * pointer may be null.
 *
 * # Safety
 * `tracker` must come from this library; non-null outputs must be valid.
 */
enum RfctStatus rfct_tracker_state(const struct RfctTracker *tracker,
                                   struct RfctBox *bbox,
                                   double *kappa,
                                   uint64_t *frame_index);

/**
 * # Safety
 * `tracker` must come from this library or be null.
 */
void rfct_tracker_free(struct RfctTracker *tracker);

/**
 * Scores `n` predicted boxes against ground truth. A ground-truth box with
 * NaN or non-positive size is skipped; such a prediction counts as a miss.
 *
 * # Safety
 * `predictions` and `ground_truth` must each point to `n` boxes and `out`
 * must be a valid pointer.
 */
enum RfctStatus rfct_evaluate(const struct RfctBox *predictions,
                              const struct RfctBox *ground_truth,
                              size_t n,
                              struct RfctMetrics *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RFCT_H */
