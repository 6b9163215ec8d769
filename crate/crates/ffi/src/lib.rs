//! C ABI for the thermal-decoherence simulator.
//!
//! Every fallible function returns a [`TdStatus`]; on failure the message is
//! available from [`td_last_error`] on the same thread. Objects are opaque
//! handles that must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use thermal_decoherence::interferometer::decoherence_function;
use thermal_decoherence::physics::cross_section::DEFAULT_CUTOFF_EV;
use thermal_decoherence::physics::{CrossSectionTable, EmissionModel, HeatCapacity, InternalState};
use thermal_decoherence::pipeline::{run_scenario, ExperimentConfig, ResultTable, Scenario};
use thermal_decoherence::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Config = 3,
    Io = 4,
    Numerical = 5,
    OutOfRange = 6,
    Panic = 7,
}

/// Emission model: cross-section table plus heat capacity.
pub struct TdModel(EmissionModel);

/// Experiment configuration.
pub struct TdConfig(ExperimentConfig);

/// Rows of a finished power sweep.
pub struct TdResultTable(ResultTable);

/// One power point of a sweep.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TdResultRow {
    pub power_w: f64,
    pub mean_entry_temperature_k: f64,
    pub max_stage_temperature_k: f64,
    pub visibility: f64,
    pub visibility_stderr: f64,
    pub baseline_visibility: f64,
    pub relative_count_rate: f64,
    pub mean_visible_photons: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn status_of(e: &Error) -> TdStatus {
    match e {
        Error::InvalidInput(_) | Error::Parse { .. } => TdStatus::InvalidInput,
        Error::Config(_) => TdStatus::Config,
        Error::Io { .. } => TdStatus::Io,
        Error::Scenario { source, .. } => status_of(source),
        _ => TdStatus::Numerical,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (TdStatus, String)>) -> TdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            TdStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            TdStatus::Panic
        }
    }
}

fn lib<T>(r: thermal_decoherence::Result<T>) -> Result<T, (TdStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (TdStatus, String) {
    (TdStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (TdStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), (TdStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn string<'a>(s: *const c_char, what: &str) -> Result<&'a str, (TdStatus, String)> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| (TdStatus::InvalidInput, format!("{what} is not UTF-8")))
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn td_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Built-in C70 model: surrogate cross-section, C_V = 202 k_B.
///
/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn td_model_new_default(out: *mut *mut TdModel) -> TdStatus {
    guard(|| {
        let model = lib(EmissionModel::new(
            CrossSectionTable::default(),
            HeatCapacity::default(),
        ))?;
        write(out, Box::into_raw(Box::new(TdModel(model))))
    })
}

/// Model from a two-column (wavelength nm, σ m²) cross-section file and a
/// constant heat capacity in units of k_B.
///
/// # Safety
/// `path` must be a NUL-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn td_model_from_table(
    path: *const c_char,
    heat_capacity_kb: f64,
    out: *mut *mut TdModel,
) -> TdStatus {
    guard(|| {
        let path = string(path, "path")?;
        let table = lib(CrossSectionTable::from_path(Path::new(path), DEFAULT_CUTOFF_EV))?;
        let cv = lib(HeatCapacity::constant(heat_capacity_kb))?;
        let model = lib(EmissionModel::new(table, cv))?;
        write(out, Box::into_raw(Box::new(TdModel(model))))
    })
}

/// # Safety
/// `model` must come from a `td_model_*` constructor, or be null.
#[no_mangle]
pub unsafe extern "C" fn td_model_free(model: *mut TdModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// R_λ in photons s⁻¹ nm⁻¹.
///
/// # Safety
/// `model` must be a live handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn td_spectral_rate_lambda(
    model: *const TdModel,
    lambda_nm: f64,
    temperature_k: f64,
    out: *mut f64,
) -> TdStatus {
    guard(|| {
        let m = deref(model, "model")?;
        if !(lambda_nm > 0.0 && temperature_k >= 0.0) {
            return Err((TdStatus::InvalidInput, "need lambda > 0 and T >= 0".into()));
        }
        write(out, m.0.spectral_rate_lambda(lambda_nm, temperature_k))
    })
}

/// Total photon emission rate, s⁻¹.
///
/// # Safety
/// `model` must be a live handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn td_total_rate(model: *const TdModel, temperature_k: f64, out: *mut f64) -> TdStatus {
    guard(|| {
        let m = deref(model, "model")?;
        write(out, lib(m.0.total_rate(temperature_k))?)
    })
}

/// Micro-canonical temperature for an internal energy in eV.
///
/// # Safety
/// `model` must be a live handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn td_micro_temperature(model: *const TdModel, energy_ev: f64, out: *mut f64) -> TdStatus {
    guard(|| {
        let m = deref(model, "model")?;
        let state = lib(InternalState::new(energy_ev))?;
        write(out, m.0.heat_capacity().temperature_k(state.energy_ev()))
    })
}

/// Decoherence factor ⟨sinc(2πΔr/λ)⟩ for one photon emitted at
/// `temperature_k`, path separation in nm.
///
/// # Safety
/// `model` must be a live handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn td_decoherence(
    model: *const TdModel,
    delta_r_nm: f64,
    temperature_k: f64,
    out: *mut f64,
) -> TdStatus {
    guard(|| {
        let m = deref(model, "model")?;
        let density = lib(m.0.total_rate_and_density(temperature_k))?;
        write(out, lib(decoherence_function(delta_r_nm, &density))?)
    })
}

/// Built-in preset by name: fig2, fig3, fig4a or fig4b.
///
/// # Safety
/// `name` must be a NUL-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn td_config_preset(name: *const c_char, out: *mut *mut TdConfig) -> TdStatus {
    guard(|| {
        let sc: Scenario = lib(string(name, "scenario name")?.parse())?;
        let cfg = lib(ExperimentConfig::preset(sc))?;
        write(out, Box::into_raw(Box::new(TdConfig(cfg))))
    })
}

/// Reads a TOML config file.
///
/// # Safety
/// `path` must be a NUL-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn td_config_from_file(path: *const c_char, out: *mut *mut TdConfig) -> TdStatus {
    guard(|| {
        let path = string(path, "path")?;
        let cfg = lib(ExperimentConfig::from_path(Path::new(path)))?;
        write(out, Box::into_raw(Box::new(TdConfig(cfg))))
    })
}

/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn td_config_set_seed(cfg: *mut TdConfig, seed: u64) -> TdStatus {
    guard(|| {
        let c = cfg.as_mut().ok_or_else(|| null("config"))?;
        c.0.seed = seed;
        Ok(())
    })
}

/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn td_config_set_ensemble_size(cfg: *mut TdConfig, molecules: usize) -> TdStatus {
    guard(|| {
        let c = cfg.as_mut().ok_or_else(|| null("config"))?;
        if molecules == 0 {
            return Err((TdStatus::InvalidInput, "ensemble size must be >= 1".into()));
        }
        c.0.ensemble_size = molecules;
        Ok(())
    })
}

/// Replaces the power sweep with `count` values from `powers_w`.
///
/// # Safety
/// `cfg` must be a live handle and `powers_w` point to `count` doubles.
#[no_mangle]
pub unsafe extern "C" fn td_config_set_powers(cfg: *mut TdConfig, powers_w: *const f64, count: usize) -> TdStatus {
    guard(|| {
        let c = cfg.as_mut().ok_or_else(|| null("config"))?;
        if powers_w.is_null() {
            return Err(null("powers"));
        }
        let p = std::slice::from_raw_parts(powers_w, count);
        if p.is_empty() || p.iter().any(|x| !(*x >= 0.0 && x.is_finite())) {
            return Err((
                TdStatus::InvalidInput,
                "powers must be a non-empty list of values >= 0".into(),
            ));
        }
        c.0.powers_w = p.to_vec();
        Ok(())
    })
}

/// # Safety
/// `cfg` must come from a `td_config_*` constructor, or be null.
#[no_mangle]
pub unsafe extern "C" fn td_config_free(cfg: *mut TdConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Runs the configured power sweep.
///
/// # Safety
/// `cfg` must be a live handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn td_run_scenario(cfg: *const TdConfig, out: *mut *mut TdResultTable) -> TdStatus {
    guard(|| {
        let c = deref(cfg, "config")?;
        let table = lib(run_scenario(&c.0))?;
        write(out, Box::into_raw(Box::new(TdResultTable(table))))
    })
}

/// Number of rows; 0 for a null handle.
///
/// # Safety
/// `table` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn td_result_len(table: *const TdResultTable) -> usize {
    table.as_ref().map_or(0, |t| t.0.rows.len())
}

/// Copies row `index` into `out`.
///
/// # Safety
/// `table` must be a live handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn td_result_row(table: *const TdResultTable, index: usize, out: *mut TdResultRow) -> TdStatus {
    guard(|| {
        let t = deref(table, "result table")?;
        let r = t.0.rows.get(index).ok_or_else(|| {
            (
                TdStatus::OutOfRange,
                format!("row {index} out of range ({} rows)", t.0.rows.len()),
            )
        })?;
        write(
            out,
            TdResultRow {
                power_w: r.power_w,
                mean_entry_temperature_k: r.mean_entry_temperature_k,
                max_stage_temperature_k: r.max_stage_temperature_k,
                visibility: r.visibility,
                visibility_stderr: r.visibility_stderr,
                baseline_visibility: r.baseline_visibility,
                relative_count_rate: r.relative_count_rate,
                mean_visible_photons: r.mean_visible_photons,
            },
        )
    })
}

/// # Safety
/// `table` must come from [`td_run_scenario`], or be null.
#[no_mangle]
pub unsafe extern "C" fn td_result_free(table: *mut TdResultTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}
