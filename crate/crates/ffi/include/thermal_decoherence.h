#ifndef THERMAL_DECOHERENCE_H
#define THERMAL_DECOHERENCE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result code of every fallible call.
 */
typedef enum TdStatus {
  TD_STATUS_OK = 0,
  TD_STATUS_NULL_POINTER = 1,
  TD_STATUS_INVALID_INPUT = 2,
  TD_STATUS_CONFIG = 3,
  TD_STATUS_IO = 4,
  TD_STATUS_NUMERICAL = 5,
  TD_STATUS_OUT_OF_RANGE = 6,
  TD_STATUS_PANIC = 7,
} TdStatus;

/*
 Experiment configuration.
 */
typedef struct TdConfig TdConfig;

/*
 Emission model: cross-section table plus heat capacity.
 */
typedef struct TdModel TdModel;

/*
 Rows of a finished power sweep.
 */
typedef struct TdResultTable TdResultTable;

/*
 One power point of a sweep.
 */
typedef struct TdResultRow {
  double power_w;
  double mean_entry_temperature_k;
  double max_stage_temperature_k;
  double visibility;
  double visibility_stderr;
  double baseline_visibility;
  double relative_count_rate;
  double mean_visible_photons;
} TdResultRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread; empty after a success.
 The pointer stays valid until the next call on this thread.
 */
const char *td_last_error(void);

/*
 Built-in C70 model: surrogate cross-section, C_V = 202 k_B.

 # Safety
 `out` must be a valid pointer to writable storage.
 */
enum TdStatus td_model_new_default(struct TdModel **out);

/*
 Model from a two-column (wavelength nm, σ m²) cross-section file and a
 constant heat capacity in units of k_B.

 # Safety
 `path` must be a NUL-terminated string, `out` writable.
 */
enum TdStatus td_model_from_table(const char *path, double heat_capacity_kb, struct TdModel **out);

/*
 # Safety
 `model` must come from a `td_model_*` constructor, or be null.
 */
void td_model_free(struct TdModel *model);

/*
 R_λ in photons s⁻¹ nm⁻¹.

 # Safety
 `model` must be a live handle, `out` writable.
 */
enum TdStatus td_spectral_rate_lambda(const struct TdModel *model,
                                      double lambda_nm,
                                      double temperature_k,
                                      double *out);

/*
 Total photon emission rate, s⁻¹.

 # Safety
 `model` must be a live handle, `out` writable.
 */
enum TdStatus td_total_rate(const struct TdModel *model, double temperature_k, double *out);

/*
 Micro-canonical temperature for an internal energy in eV.

 # Safety
 `model` must be a live handle, `out` writable.
 */
enum TdStatus td_micro_temperature(const struct TdModel *model, double energy_ev, double *out);

/*
 Decoherence factor ⟨sinc(2πΔr/λ)⟩ for one photon emitted at
 `temperature_k`, path separation in nm.

 # Safety
 `model` must be a live handle, `out` writable.
 */
enum TdStatus td_decoherence(const struct TdModel *model,
                             double delta_r_nm,
                             double temperature_k,
                             double *out);

/*
 Built-in preset by name: fig2, fig3, fig4a or fig4b.

 # Safety
 `name` must be a NUL-terminated string, `out` writable.
 */
enum TdStatus td_config_preset(const char *name, struct TdConfig **out);

/*
 Reads a TOML config file.

 # Safety
 `path` must be a NUL-terminated string, `out` writable.
 */
enum TdStatus td_config_from_file(const char *path, struct TdConfig **out);

/*
 # Safety
 `cfg` must be a live handle.
 */
enum TdStatus td_config_set_seed(struct TdConfig *cfg, uint64_t seed);

/*
 # Safety
 `cfg` must be a live handle.
 */
enum TdStatus td_config_set_ensemble_size(struct TdConfig *cfg, size_t molecules);

/*
 Replaces the power sweep with `count` values from `powers_w`.

 # Safety
 `cfg` must be a live handle and `powers_w` point to `count` doubles.
 */
enum TdStatus td_config_set_powers(struct TdConfig *cfg, const double *powers_w, size_t count);

/*
 # Safety
 `cfg` must come from a `td_config_*` constructor, or be null.
 */
void td_config_free(struct TdConfig *cfg);

/*
 Runs the configured power sweep.

 # Safety
 `cfg` must be a live handle, `out` writable.
 */
enum TdStatus td_run_scenario(const struct TdConfig *cfg, struct TdResultTable **out);

/*
 Number of rows; 0 for a null handle.

 # Safety
 `table` must be a live handle or null.
 */
size_t td_result_len(const struct TdResultTable *table);

/*
 Copies row `index` into `out`.

 # Safety
 `table` must be a live handle, `out` writable.
 */
enum TdStatus td_result_row(const struct TdResultTable *table,
                            size_t index,
                            struct TdResultRow *out);

/*
 # Safety
 `table` must come from [`td_run_scenario`], or be null.
 */
void td_result_free(struct TdResultTable *table);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* THERMAL_DECOHERENCE_H */
