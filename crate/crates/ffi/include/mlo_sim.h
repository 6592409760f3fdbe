/* C interface to the mlo-sim multi-link Wi-Fi simulator. */

#ifndef MLO_SIM_H
#define MLO_SIM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum MloStatus {
  MLO_STATUS_OK = 0,
  MLO_STATUS_NULL_ARGUMENT = 1,
  MLO_STATUS_INVALID_ARGUMENT = 2,
  MLO_STATUS_IO = 3,
  MLO_STATUS_PARSE = 4,
  MLO_STATUS_UNSUPPORTED = 5,
  MLO_STATUS_INTERNAL = 6,
} MloStatus;

/**
 * Channel-access policy selector.
 */
typedef enum MloPolicy {
  MLO_POLICY_SLO = 0,
  MLO_POLICY_STR = 1,
  MLO_POLICY_NSTR = 2,
  MLO_POLICY_STR_PLUS = 3,
} MloPolicy;

/**
 * Opaque busy/idle trace handle; create with `mlo_trace_*`, release with
 * `mlo_trace_free`.
 */
typedef struct MloTrace MloTrace;

/**
 * Aggregates of one run. Delay statistics are NaN when nothing was
 * delivered.
 */
typedef struct MloSummary {
  double throughput_bps;
  double mean_delay_us;
  double p95_delay_us;
  double jitter_us;
  double mean_queueing_us;
  double p95_queueing_us;
  double mean_access_us;
  double p95_access_us;
  double delivered_fraction;
  uint64_t arrivals;
  uint64_t delivered;
  /**
   * 1 when at least 95% of arrivals were delivered.
   */
  uint8_t stable;
} MloSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static description of a status code.
 */
const char *mlo_status_str(enum MloStatus status);

/**
 * Synthesizes a trace with independent per-slot busy probability.
 *
 * # Safety
 * `out` must point to writable storage for one pointer.
 */
enum MloStatus mlo_trace_iid(double occupancy, size_t slots, uint64_t seed, struct MloTrace **out);

/**
 * Synthesizes a bursty on/off trace with geometric sojourns.
 *
 * # Safety
 * `out` must point to writable storage for one pointer.
 */
enum MloStatus mlo_trace_onoff(double occupancy,
                               double mean_busy_slots,
                               size_t slots,
                               uint64_t seed,
                               struct MloTrace **out);

/**
 * Number of samples in a native trace file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum MloStatus mlo_trace_sample_count(const char *path, double threshold_dbm, size_t *out);

/**
 * Loads the `index`-th sample of a native trace file, binarized at the
 * given threshold.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum MloStatus mlo_trace_load(const char *path,
                              double threshold_dbm,
                              size_t index,
                              struct MloTrace **out);

/**
 * Busy fraction of a trace; NaN for a null handle.
 */
double mlo_trace_occupancy(const struct MloTrace *trace);

/**
 * Releases a trace handle. Null is a no-op.
 *
 * # Safety
 * `trace` must have come from this library and not been freed before.
 */
void mlo_trace_free(struct MloTrace *trace);

/**
 * Runs one seeded experiment with Poisson traffic at `rate_bps` and default
 * MAC timing. `secondary` may be null for single-link operation.
 *
 * # Safety
 * Trace handles must be live; `out` must be writable.
 */
enum MloStatus mlo_run_poisson(enum MloPolicy policy,
                               const struct MloTrace *primary,
                               const struct MloTrace *secondary,
                               double rate_bps,
                               uint64_t horizon_us,
                               uint64_t seed,
                               struct MloSummary *out);

/**
 * Runs one seeded experiment with a fully backlogged queue (saturation).
 *
 * # Safety
 * Trace handles must be live; `out` must be writable.
 */
enum MloStatus mlo_run_saturated(enum MloPolicy policy,
                                 const struct MloTrace *primary,
                                 const struct MloTrace *secondary,
                                 uint64_t horizon_us,
                                 uint64_t seed,
                                 struct MloSummary *out);

/**
 * Closed-form mean throughput under iid channel activity, in bits/s.
 * Returns Unsupported for the deferred-decision policy.
 *
 * # Safety
 * `out_bps` must be writable.
 */
enum MloStatus mlo_model_throughput(enum MloPolicy policy,
                                    double rho1,
                                    double rho2,
                                    double *out_bps);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MLO_SIM_H */
