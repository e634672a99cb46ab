/* C interface to the collision avoidance pipeline. */

#ifndef CAS_FFI_H
#define CAS_FFI_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum CasStatus {
  CasStatus_Ok = 0,
  CasStatus_NullArgument = 1,
  CasStatus_InvalidUtf8 = 2,
  CasStatus_IoError = 3,
  CasStatus_ParseError = 4,
  CasStatus_ValidationError = 5,
  CasStatus_ZeroRelativePosition = 6,
  CasStatus_MalformedTrace = 7,
} CasStatus;

/**
 * Opaque run-result handle carrying the serialized outputs.
 */
typedef struct CasRun CasRun;

/**
 * Opaque scenario handle.
 */
typedef struct CasScenario CasScenario;

/**
 * Closest-point-of-approach result, C layout.
 */
typedef struct CasCpaResult {
  double t_cpa;
  double miss_distance;
  /**
   * 1 when the geometry is closing, 0 otherwise.
   */
  uint8_t closing;
} CasCpaResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *cas_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *cas_version(void);

/**
 * Closest point of approach for a relative position/velocity pair.
 */
enum CasStatus cas_cpa(double px,
                       double py,
                       double pz,
                       double vx,
                       double vy,
                       double vz,
                       struct CasCpaResult *out);

/**
 * Loads and validates a scenario file. On success writes a handle that
 * must be released with `cas_scenario_free`.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string; `out` must be writable.
 */
enum CasStatus cas_scenario_load(const char *path, struct CasScenario **out);

/**
 * Releases a scenario handle. A null pointer is a no-op.
 *
 * # Safety
 * `scenario` must have come from `cas_scenario_load` and not be freed twice.
 */
void cas_scenario_free(struct CasScenario *scenario);

/**
 * Number of simulation ticks the scenario will run.
 *
 * # Safety
 * `scenario` must be a live handle from `cas_scenario_load`.
 */
uintptr_t cas_scenario_ticks(const struct CasScenario *scenario);

/**
 * Runs a scenario with default pipeline configuration. On success writes
 * a run handle that must be released with `cas_run_free`.
 *
 * # Safety
 * `scenario` must be a live handle; `out` must be writable.
 */
enum CasStatus cas_scenario_run(const struct CasScenario *scenario, struct CasRun **out);

/**
 * Releases a run handle. A null pointer is a no-op.
 *
 * # Safety
 * `run` must have come from `cas_scenario_run` and not be freed twice.
 */
void cas_run_free(struct CasRun *run);

/**
 * Serialized event trace of a run; owned by the handle.
 *
 * # Safety
 * `run` must be a live handle from `cas_scenario_run`.
 */
const char *cas_run_trace(const struct CasRun *run);

/**
 * Ground-link log of a run; owned by the handle.
 *
 * # Safety
 * `run` must be a live handle from `cas_scenario_run`.
 */
const char *cas_run_gclog(const struct CasRun *run);

/**
 * Per-tick CSV of a run; owned by the handle.
 *
 * # Safety
 * `run` must be a live handle from `cas_scenario_run`.
 */
const char *cas_run_csv(const struct CasRun *run);

/**
 * Minimum own-intruder separation of the closed-loop run, measured by the
 * fine-resampling oracle. `maneuver_enabled = 0` measures the uncontrolled
 * baseline. With no intruders the result is +inf.
 *
 * # Safety
 * `scenario` must be a live handle; `out` must be writable.
 */
enum CasStatus cas_min_separation(const struct CasScenario *scenario,
                                  uint8_t maneuver_enabled,
                                  double *out);

/**
 * Runs the four trace monitors over serialized trace text. On success
 * writes a NUL-terminated report (one `<property> <verdict>` line per
 * property) that the caller frees with `cas_string_free`.
 *
 * # Safety
 * `trace_text` must be a valid NUL-terminated string; `out` must be
 * writable.
 */
enum CasStatus cas_monitor_trace(const char *trace_text,
                                 uint32_t horizon_ticks,
                                 uint8_t raw_c2,
                                 char **out);

/**
 * Frees a string returned by `cas_monitor_trace`. A null pointer is a
 * no-op.
 *
 * # Safety
 * `s` must have come from this library and not be freed twice.
 */
void cas_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CAS_FFI_H */
