use std::ffi::{CStr, CString};
use std::ptr;

use thermal_decoherence_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(td_last_error()) }
        .to_string_lossy()
        .into_owned()
}

fn model() -> *mut TdModel {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { td_model_new_default(&mut m) }, TdStatus::Ok);
    assert!(!m.is_null());
    m
}

#[test]
fn physics_entry_points() {
    let m = model();
    unsafe {
        let mut r = 0.0;
        assert_eq!(td_spectral_rate_lambda(m, 500.0, 2500.0, &mut r), TdStatus::Ok);
        assert!(r > 0.0);
        let mut cold = 1.0;
        assert_eq!(td_spectral_rate_lambda(m, 500.0, 0.0, &mut cold), TdStatus::Ok);
        assert_eq!(cold, 0.0);

        let mut total = 0.0;
        assert_eq!(td_total_rate(m, 2500.0, &mut total), TdStatus::Ok);
        assert!(total > 0.0);

        // 140 K per 514.5 nm photon with C_V = 202 k_B.
        let mut t = 0.0;
        let photon_ev = 1239.841984 / 514.5;
        assert_eq!(td_micro_temperature(m, photon_ev, &mut t), TdStatus::Ok);
        assert!((t - 138.4).abs() < 1.0, "{t}");

        let mut eta = 0.0;
        assert_eq!(td_decoherence(m, 0.0, 2500.0, &mut eta), TdStatus::Ok);
        assert_eq!(eta, 1.0);
        assert_eq!(td_decoherence(m, 800.0, 2500.0, &mut eta), TdStatus::Ok);
        assert!(eta.abs() < 0.5);
        td_model_free(m);
    }
}

#[test]
fn errors_set_status_and_message() {
    let m = model();
    unsafe {
        let mut x = 0.0;
        assert_eq!(td_spectral_rate_lambda(m, -1.0, 2500.0, &mut x), TdStatus::InvalidInput);
        assert!(!last_error().is_empty());
        assert_eq!(td_total_rate(ptr::null(), 2500.0, &mut x), TdStatus::NullPointer);
        assert!(last_error().contains("model"));
        assert_eq!(td_total_rate(m, 2500.0, ptr::null_mut()), TdStatus::NullPointer);
        assert_eq!(td_decoherence(m, -3.0, 2500.0, &mut x), TdStatus::InvalidInput);
        assert_eq!(td_total_rate(m, 2500.0, &mut x), TdStatus::Ok);
        assert!(last_error().is_empty());

        let bad = CString::new("fig9").unwrap();
        let mut cfg = ptr::null_mut();
        assert_eq!(td_config_preset(bad.as_ptr(), &mut cfg), TdStatus::Config);
        assert!(cfg.is_null());
        let custom = CString::new("custom").unwrap();
        assert_eq!(td_config_preset(custom.as_ptr(), &mut cfg), TdStatus::Config);

        let missing = CString::new("/nonexistent/thermdeco.toml").unwrap();
        assert_eq!(td_config_from_file(missing.as_ptr(), &mut cfg), TdStatus::Io);

        td_model_free(m);
        td_model_free(ptr::null_mut());
        td_config_free(ptr::null_mut());
        td_result_free(ptr::null_mut());
        assert_eq!(td_result_len(ptr::null()), 0);
    }
}

#[test]
fn scenario_run_and_rows() {
    unsafe {
        let name = CString::new("fig4a").unwrap();
        let mut cfg = ptr::null_mut();
        assert_eq!(td_config_preset(name.as_ptr(), &mut cfg), TdStatus::Ok);
        assert_eq!(td_config_set_seed(cfg, 7), TdStatus::Ok);
        assert_eq!(td_config_set_ensemble_size(cfg, 0), TdStatus::InvalidInput);
        assert_eq!(td_config_set_ensemble_size(cfg, 40), TdStatus::Ok);
        let powers = [6.0, 0.0];
        assert_eq!(td_config_set_powers(cfg, powers.as_ptr(), 0), TdStatus::InvalidInput);
        assert_eq!(td_config_set_powers(cfg, powers.as_ptr(), powers.len()), TdStatus::Ok);

        let mut table = ptr::null_mut();
        assert_eq!(td_run_scenario(cfg, &mut table), TdStatus::Ok);
        assert_eq!(td_result_len(table), 2);
        let mut rows = [TdResultRow::default(); 2];
        for (i, r) in rows.iter_mut().enumerate() {
            assert_eq!(td_result_row(table, i, r), TdStatus::Ok);
        }
        assert_eq!(rows[0].power_w, 0.0);
        assert!((rows[0].visibility - rows[0].baseline_visibility).abs() < 1e-6);
        assert!(rows[1].visibility < rows[0].visibility);
        let mut extra = TdResultRow::default();
        assert_eq!(td_result_row(table, 2, &mut extra), TdStatus::OutOfRange);

        td_result_free(table);
        td_config_free(cfg);
    }
}

#[test]
fn header_is_valid_c() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = dir.join("include/thermal_decoherence.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for f in [
        "td_last_error",
        "td_model_new_default",
        "td_spectral_rate_lambda",
        "td_total_rate",
        "td_micro_temperature",
        "td_decoherence",
        "td_run_scenario",
        "td_result_row",
        "td_result_free",
    ] {
        assert!(text.contains(f), "{f} missing from header");
    }
    let Ok(status) = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-std=c99", "-Wall", "-Werror", "-x", "c"])
        .arg(&header)
        .status()
    else {
        eprintln!("no C compiler, skipping syntax check");
        return;
    };
    assert!(status.success());
}
