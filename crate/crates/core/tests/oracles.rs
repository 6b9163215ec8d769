//! Values computed independently (extended-precision quadrature, brute-force
//! Fourier sums, explicit Euler) and frozen here.

#![allow(clippy::excessive_precision)]

use std::f64::consts::PI;

use thermal_decoherence::heating::TemperatureTrajectory;
use thermal_decoherence::interferometer::{
    base_coefficients, closed_form_visibility, de_broglie_and_talbot, Baseline, Interferometer, InterferometerGeometry,
};
use thermal_decoherence::physics::{
    cool, sinc, CrossSectionTable, EmissionModel, HeatCapacity, InternalState, RadiativeLoss,
};

fn model() -> EmissionModel {
    EmissionModel::new(CrossSectionTable::default_surrogate(), HeatCapacity::default()).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn spectral_rate_point_values() {
    let m = model();
    for (l, t, want) in [
        (500.0, 2500.0, 2.4295872380788995),
        (650.0, 3000.0, 11.101021942375764),
        (400.0, 1500.0, 2.1982373518573454e-5),
        (300.0, 3500.0, 72.438415530391929),
    ] {
        let got = m.spectral_rate_lambda(l, t);
        assert!(rel(got, want) < 1e-12, "R({l} nm, {t} K) = {got}, want {want}");
    }
}

#[test]
fn total_rate_values() {
    let m = model();
    for (t, want) in [
        (1500.0, 0.93435991457824462),
        (2500.0, 799.71213882559311),
        (3500.0, 32735.172744609304),
    ] {
        let got = m.total_rate(t).unwrap();
        assert!(rel(got, want) < 1e-9, "{t} K: {got} vs {want}");
        let (grid, _) = m.grid().rate_and_power(t, m.heat_capacity());
        assert!(rel(grid, want) < 1e-8, "{t} K grid: {grid} vs {want}");
    }
}

#[test]
fn visible_photons_at_2500_kelvin() {
    let m = model();
    let n = m.band_rate(2500.0) * 4e-3;
    assert!(rel(n, 3.0000008655508887) < 1e-8, "{n}");
}

#[test]
fn talbot_lau_coefficients_match_fourier_sum() {
    // Brute-force Σ_n b_n b_{n−2ℓ} e^{2πiξℓ(n−ℓ)}·a_ℓ², |n| ≤ 3·10⁶.
    let g = InterferometerGeometry::default();
    let cases = [
        (
            190.0,
            2.4979061889210565,
            [
                0.11011838536181602,
                0.0053598114343480175,
                -3.0197481124844303e-05,
                0.00043511469346753097,
            ],
        ),
        (
            100.0,
            4.746021758950008,
            [
                0.11011838536181602,
                0.014708548226161997,
                3.1916258438323975e-05,
                1.3e-16,
            ],
        ),
    ];
    for (v, lambda_pm, want) in cases {
        let (lam, _) = de_broglie_and_talbot(&g, v).unwrap();
        assert!(rel(lam, lambda_pm) < 1e-12);
        let c = base_coefficients(&g, lam).unwrap();
        for (l, w) in want.iter().enumerate() {
            let got = c.get(l as i64);
            assert!(
                (got.re - w).abs() < 1e-7 && got.im.abs() < 1e-7,
                "v {v} l {l}: {got} vs {w}"
            );
        }
        assert!(rel(c.visibility(), 2.0 * want[1].abs() / want[0]) < 1e-5);
    }
}

#[test]
fn cooling_matches_explicit_euler() {
    let m = model();
    let cv = *m.heat_capacity();
    let e0 = cv.energy_ev(4000.0);
    let dt = 4e-3;
    let steps = 400_000;
    let h = dt / steps as f64;
    let mut e = e0;
    for _ in 0..steps {
        e -= h * m.power_at_energy(e);
    }
    let got = cool(&InternalState::new(e0).unwrap(), dt, &m).unwrap().energy_ev();
    assert!(got < e0);
    assert!(rel(got, e) < 1e-4, "{got} vs Euler {e}");
}

/// Riemann double sum over time and wavelength of R_λ·(1 − sinc).
fn riemann_exponent(m: &EmissionModel, g: &InterferometerGeometry, t_k: f64, v: f64) -> (f64, f64) {
    let (lo, hi) = m.table().support_nm();
    let nl = 8000;
    let nt = 4000;
    let dl = (hi - lo) / nl as f64;
    let t_end = g.transit_time_s(v);
    let dt = t_end / nt as f64;
    let lambdas: Vec<f64> = (0..nl).map(|i| lo + (i as f64 + 0.5) * dl).collect();
    let rates: Vec<f64> = lambdas.iter().map(|&l| m.spectral_rate_lambda(l, t_k) * dl).collect();
    let mut x = 0.0;
    for j in 0..nt {
        let dr = g.path_separation_nm(1.0, (j as f64 + 0.5) * dt, v);
        let s: f64 = lambdas
            .iter()
            .zip(&rates)
            .map(|(l, r)| r * (1.0 - sinc(2.0 * PI * dr / l)))
            .sum();
        x += s * dt;
    }
    let visible: f64 = lambdas
        .iter()
        .zip(&rates)
        .filter(|(l, _)| (400.0..=800.0).contains(*l))
        .map(|(_, r)| r)
        .sum::<f64>()
        * t_end;
    (x, visible)
}

#[test]
fn closed_form_matches_riemann_sum() {
    let m = model();
    let g = InterferometerGeometry::default();
    let ifm = Interferometer::new(g, m.clone(), Baseline::Anchored { visibility: 0.47 }).unwrap();
    let v = 190.0;
    let t_end = g.transit_time_s(v);
    let t_k = 2500.0;
    let traj = TemperatureTrajectory::constant(v, m.heat_capacity().energy_ev(t_k), 0.0, t_end).unwrap();
    let r = closed_form_visibility(&traj, &ifm).unwrap();
    let (x, visible) = riemann_exponent(&m, &g, t_k, v);
    let v_riemann = 0.47 * (-x).exp();
    assert!(rel(r.visibility, v_riemann) < 1e-4, "{} vs {v_riemann}", r.visibility);
    assert!(rel(r.visible_photons, visible) < 1e-3);
    // Simpson oracle on a 4001 × 401-per-panel grid.
    assert!(rel(r.visibility, 0.03101706481286469) < 1e-8, "{}", r.visibility);
}

#[test]
fn closed_form_frozen_values() {
    let m = model();
    let g = InterferometerGeometry::default();
    let ifm = Interferometer::new(g, m.clone(), Baseline::Anchored { visibility: 0.47 }).unwrap();
    let v = 190.0;
    for (t_k, want) in [(2000.0, 0.38973323098295415), (3000.0, 7.32765657633962e-10)] {
        let traj =
            TemperatureTrajectory::constant(v, m.heat_capacity().energy_ev(t_k), 0.0, g.transit_time_s(v)).unwrap();
        let got = closed_form_visibility(&traj, &ifm).unwrap().visibility;
        assert!(rel(got, want) < 1e-6, "{t_k} K: {got} vs {want}");
    }
}
