#ifndef HELIOS_H
#define HELIOS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum HeliosStatus {
  HELIOS_STATUS_OK = 0,
  HELIOS_STATUS_NULL_POINTER = 1,
  HELIOS_STATUS_INVALID_ARGUMENT = 2,
  HELIOS_STATUS_PARSE = 3,
  HELIOS_STATUS_IO = 4,
  HELIOS_STATUS_BUDGET_EXCEEDED = 5,
  HELIOS_STATUS_OUT_OF_RANGE = 6,
  HELIOS_STATUS_PANIC = 7,
} HeliosStatus;

// Simulator configuration.
typedef struct HeliosConfig HeliosConfig;

// Hourly load and resource data.
typedef struct HeliosScenario HeliosScenario;

// Closed-loop result of one strategy.
typedef struct HeliosTrace HeliosTrace;

// One simulated hour.
typedef struct HeliosStepRecord {
  size_t hour;
  double load_kw;
  double renewable_available_kw;
  double renewable_used_kw;
  double p_ch_kw;
  double p_dis_kw;
  double backup_kw;
  double curtailed_kw;
  double soc_start_kwh;
  double soc_kwh;
  double cost_battery;
  double cost_backup;
  double cost_penalty;
  double cost_total;
} HeliosStepRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. Valid until the
// next `helios_*` call on the same thread.
const char *helios_last_error(void);

// Library version as a static NUL-terminated string.
const char *helios_version(void);

// Default configuration.
//
// # Safety
// `out` must be a valid pointer to writable storage.
enum HeliosStatus helios_config_new(struct HeliosConfig **out);

// Configuration from a `key = value` file.
//
// # Safety
// `path` must be NUL-terminated; `out` must be writable.
enum HeliosStatus helios_config_load(const char *path, struct HeliosConfig **out);

// Sets one configuration key using the config-file syntax, e.g. `("horizon", "6")`.
// The configuration is unchanged on failure.
//
// # Safety
// `cfg` must come from this library; `key` and `value` must be NUL-terminated.
enum HeliosStatus helios_config_set(struct HeliosConfig *cfg, const char *key, const char *value);

// # Safety
// `cfg` must be NULL or a handle from this library not yet freed.
void helios_config_free(struct HeliosConfig *cfg);

// Renewable power (kW) predicted by the configured surrogate.
//
// # Safety
// `cfg` must come from this library; `out` must be writable.
enum HeliosStatus helios_renewable_predict(const struct HeliosConfig *cfg,
                                           double irradiance,
                                           double wind_speed,
                                           double *out);

// Loads an hourly CSV (`hour,irradiance_kwh_m2,wind_ms,load_kw[,renewable_kw]`).
//
// # Safety
// `path` must be NUL-terminated; `out` must be writable.
enum HeliosStatus helios_scenario_load_csv(const char *path, struct HeliosScenario **out);

// Synthetic scenario using the profile in `cfg`.
//
// # Safety
// `cfg` must come from this library; `out` must be writable.
enum HeliosStatus helios_scenario_synthetic(const struct HeliosConfig *cfg,
                                            size_t days,
                                            uint64_t seed,
                                            struct HeliosScenario **out);

// Scenario from caller-owned arrays of length `steps`; the data is copied.
//
// # Safety
// Each array must hold `steps` readable doubles (may be NULL when `steps` is 0).
enum HeliosStatus helios_scenario_from_arrays(size_t start_hour,
                                              size_t steps,
                                              const double *irradiance,
                                              const double *wind_speed,
                                              const double *load,
                                              struct HeliosScenario **out);

// Number of hours in the scenario; 0 for NULL.
//
// # Safety
// `s` must be NULL or a live handle.
size_t helios_scenario_steps(const struct HeliosScenario *s);

// # Safety
// `s` must be NULL or a handle from this library not yet freed.
void helios_scenario_free(struct HeliosScenario *s);

// Closed-loop simulation of the named strategy (e.g. `"eg_mpc"`).
//
// # Safety
// Handles must come from this library; `strategy` must be NUL-terminated;
// `out` must be writable.
enum HeliosStatus helios_simulate(const struct HeliosScenario *scenario,
                                  const struct HeliosConfig *cfg,
                                  const char *strategy,
                                  uint64_t seed,
                                  struct HeliosTrace **out);

// Number of records; 0 for NULL.
//
// # Safety
// `t` must be NULL or a live handle.
size_t helios_trace_len(const struct HeliosTrace *t);

// Total realised cost.
//
// # Safety
// `t` must come from this library; `out` must be writable.
enum HeliosStatus helios_trace_total_cost(const struct HeliosTrace *t, double *out);

// Copies record `index` into `out`.
//
// # Safety
// `t` must come from this library; `out` must be writable.
enum HeliosStatus helios_trace_record(const struct HeliosTrace *t,
                                      size_t index,
                                      struct HeliosStepRecord *out);

// Writes the per-hour trace CSV.
//
// # Safety
// `t` must come from this library; `path` must be NUL-terminated.
enum HeliosStatus helios_trace_write_csv(const struct HeliosTrace *t, const char *path);

// # Safety
// `t` must be NULL or a handle from this library not yet freed.
void helios_trace_free(struct HeliosTrace *t);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HELIOS_H */
