#ifndef DUALRIS_H
#define DUALRIS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum DrisStatus {
  DRIS_STATUS_OK = 0,
  DRIS_STATUS_NULL_POINTER = 1,
  DRIS_STATUS_INVALID_UTF8 = 2,
  DRIS_STATUS_INVALID_CONFIG = 3,
  DRIS_STATUS_BAD_LENGTH = 4,
  DRIS_STATUS_BAD_ACTION = 5,
  DRIS_STATUS_NO_ACTIVE_EPISODE = 6,
  DRIS_STATUS_EPISODE_DONE = 7,
  DRIS_STATUS_BUFFER_TOO_SMALL = 8,
  DRIS_STATUS_INTERNAL = 9,
} DrisStatus;

/**
 * Opaque environment handle.
 */
typedef struct DrisEnv DrisEnv;

/**
 * Scalar outcome of one step. Per-node rates are available through
 * [`dris_env_last_rates`].
 */
typedef struct DrisStepOut {
  double reward;
  /**
   * 1 once the final slot has been played.
   */
  uint8_t done;
  /**
   * 1 if the move was reverted for leaving the area.
   */
  uint8_t boundary;
  /**
   * Minimum over nodes of the running time-averaged rate.
   */
  double min_rate;
  /**
   * Downlink transmit power after projection.
   */
  double power_used;
  uint32_t clamp_count;
} DrisStepOut;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Create an environment from a JSON configuration. A null or empty string
 * selects the defaults.
 *
 * # Safety
 * `config_json` must be null or a NUL-terminated string; `out` must be a
 * valid pointer to write the handle to.
 */
enum DrisStatus dris_env_new(const char *config_json, struct DrisEnv **out);

/**
 * Release a handle. Null is ignored.
 *
 * # Safety
 * `env` must be null or a handle from [`dris_env_new`] not yet freed.
 */
void dris_env_free(struct DrisEnv *env);

/**
 * Observation vector length, or 0 for a null handle.
 *
 * # Safety
 * `env` must be null or a live handle.
 */
size_t dris_env_obs_len(const struct DrisEnv *env);

/**
 * Action vector length, or 0 for a null handle.
 *
 * # Safety
 * `env` must be null or a live handle.
 */
size_t dris_env_action_len(const struct DrisEnv *env);

/**
 * Number of IoT nodes, or 0 for a null handle.
 *
 * # Safety
 * `env` must be null or a live handle.
 */
size_t dris_env_num_nodes(const struct DrisEnv *env);

/**
 * Start an episode and write the initial observation.
 *
 * # Safety
 * `env` must be a live handle and `obs_out` valid for `obs_cap` writes.
 */
enum DrisStatus dris_env_reset(struct DrisEnv *env, uint64_t seed, double *obs_out, size_t obs_cap);

/**
 * Advance one slot. The buffer size is checked before the environment
 * changes, so `DRIS_STATUS_BUFFER_TOO_SMALL` leaves the episode untouched.
 *
 * # Safety
 * `env` must be a live handle, `action` valid for `action_len` reads,
 * `obs_out` valid for `obs_cap` writes and `out` a valid pointer.
 */
enum DrisStatus dris_env_step(struct DrisEnv *env,
                              const double *action,
                              size_t action_len,
                              double *obs_out,
                              size_t obs_cap,
                              struct DrisStepOut *out);

/**
 * Copy the per-node weighted rates of the most recent step (K values).
 *
 * # Safety
 * `env` must be a live handle and `rates_out` valid for `cap` writes.
 */
enum DrisStatus dris_env_last_rates(const struct DrisEnv *env, double *rates_out, size_t cap);

/**
 * Copy this thread's last error message as a NUL-terminated string,
 * truncating to `cap - 1` bytes. Returns the full message length
 * excluding the terminator, so callers can size a buffer by calling with
 * `cap = 0`.
 *
 * # Safety
 * `buf` must be null or valid for `cap` writes.
 */
size_t dris_last_error_message(char *buf, size_t cap);

/**
 * Library version as a static NUL-terminated string.
 */
const char *dris_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DUALRIS_H */
