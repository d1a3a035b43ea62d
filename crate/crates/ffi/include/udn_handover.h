#ifndef UDN_HANDOVER_H
#define UDN_HANDOVER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum UdnStatus {
  UDN_STATUS_OK = 0,
  UDN_STATUS_NULL_POINTER = 1,
  UDN_STATUS_INVALID_UTF8 = 2,
  UDN_STATUS_PARSE_ERROR = 3,
  UDN_STATUS_INVALID_CONFIG = 4,
  UDN_STATUS_OUT_OF_RANGE = 5,
  UDN_STATUS_PANIC = 6,
} UdnStatus;

typedef enum UdnCase {
  UDN_CASE_A = 0,
  UDN_CASE_B = 1,
  /**
   * Route taken from the configuration.
   */
  UDN_CASE_CUSTOM = 2,
} UdnCase;

/**
 * Opaque simulation configuration.
 */
typedef struct UdnConfig UdnConfig;

/**
 * Opaque result of a single iteration.
 */
typedef struct UdnRunResult UdnRunResult;

typedef struct UdnGridPoint {
  enum UdnCase route;
  uint32_t ttt_tics;
  uint32_t den_gnb;
  double velocity_kmh;
} UdnGridPoint;

/**
 * Aggregated KPIs of one grid cell. Undefined geometries are NaN.
 */
typedef struct UdnKpiCell {
  struct UdnGridPoint point;
  uint32_t iterations;
  double mean_ho_rate;
  double ho_avg_geo_db;
  double pooled_ho_avg_geo_db;
  bool failure;
  uint32_t iterations_with_handover;
  double connection_losses_mean;
} UdnKpiCell;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *udn_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *udn_version(void);

/**
 * New configuration holding the built-in defaults.
 */
struct UdnConfig *udn_config_new(void);

/**
 * Parses config-file text into a new configuration.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum UdnStatus udn_config_parse(const char *text, struct UdnConfig **out);

/**
 * # Safety
 * `cfg` must be NULL or a pointer returned by this library, not yet freed.
 */
void udn_config_free(struct UdnConfig *cfg);

/**
 * Checks every configuration invariant.
 *
 * # Safety
 * `cfg` must be a live configuration handle.
 */
enum UdnStatus udn_config_validate(const struct UdnConfig *cfg);

/**
 * Renders the configuration in config-file syntax. Release the string
 * with [`udn_string_free`].
 *
 * # Safety
 * `cfg` must be a live configuration handle.
 */
char *udn_config_to_string(const struct UdnConfig *cfg);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, not yet freed.
 */
void udn_string_free(char *s);

/**
 * Pathloss in dB at `distance_m` under the configuration's link budget.
 *
 * # Safety
 * `cfg` must be a live configuration handle.
 */
double udn_pathloss_db(const struct UdnConfig *cfg, double distance_m);

/**
 * Receiver noise power in dBm.
 *
 * # Safety
 * `cfg` must be a live configuration handle.
 */
double udn_noise_power_dbm(const struct UdnConfig *cfg);

/**
 * Runs `iterations` Monte Carlo iterations of one grid cell.
 *
 * # Safety
 * `cfg` must be a live configuration handle and `out` a valid pointer.
 */
enum UdnStatus udn_run_cell(const struct UdnConfig *cfg,
                            struct UdnGridPoint point,
                            uint32_t iterations,
                            uint64_t seed,
                            bool crn,
                            struct UdnKpiCell *out);

/**
 * Runs iteration `iteration` of a grid cell exactly as [`udn_run_cell`]
 * would, returning the per-run result.
 *
 * # Safety
 * `cfg` must be a live configuration handle and `out` a valid pointer.
 */
enum UdnStatus udn_run_iteration(const struct UdnConfig *cfg,
                                 struct UdnGridPoint point,
                                 uint32_t iteration,
                                 uint64_t seed,
                                 bool crn,
                                 struct UdnRunResult **out);

/**
 * # Safety
 * `res` must be NULL or a pointer returned by this library, not yet freed.
 */
void udn_run_result_free(struct UdnRunResult *res);

/**
 * # Safety
 * `res` must be a live run-result handle.
 */
uint32_t udn_run_result_ho_times(const struct UdnRunResult *res);

/**
 * # Safety
 * `res` must be a live run-result handle.
 */
uint32_t udn_run_result_connection_losses(const struct UdnRunResult *res);

/**
 * Average handover geometry of the run; NaN without handovers.
 *
 * # Safety
 * `res` must be a live run-result handle.
 */
double udn_run_result_ho_avg_geo_db(const struct UdnRunResult *res);

/**
 * Best-cell geometry sampled at handover `index`.
 *
 * # Safety
 * `res` must be a live run-result handle and `out` a valid pointer.
 */
enum UdnStatus udn_run_result_ho_geo(const struct UdnRunResult *res, size_t index, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UDN_HANDOVER_H */
