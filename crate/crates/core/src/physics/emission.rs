//! Spectral photon emission rate of a hot molecule and the quantities
//! derived from it.
//!
//! ```text
//! R_ω(ω, T) = ω² / (π² c²) · σ_abs(ω) · exp[−x − x² / (2 C_V / k_B)],   x = ħω / (k_B T)
//! R_λ(λ, T) = R_ω · 2πc / λ²
//! ```

use std::f64::consts::PI;
use std::sync::Arc;

use crate::constants::{
    omega_from_wavelength_nm, photon_energy_ev, wavelength_nm_from_omega, BOLTZMANN_EV, EV_J, HBAR, SPEED_OF_LIGHT,
};
use crate::error::{Error, Result};
use crate::numerics::quadrature::{composite_gauss_legendre, integrate_piecewise, QuadOptions};
use crate::physics::cross_section::CrossSectionTable;
use crate::physics::density::SpectralDensity;
use crate::physics::state::HeatCapacity;

/// Nodes per panel of the fixed spectral grid.
const GRID_ORDER: usize = 6;
/// Longest panel of the fixed spectral grid, nm.
const GRID_MAX_PANEL_NM: f64 = 10.0;

fn boltzmann_factor(energy_ev: f64, t_m: f64, cv_kb: f64) -> f64 {
    if !(t_m > 0.0) {
        return 0.0;
    }
    let x = energy_ev / (BOLTZMANN_EV * t_m);
    (-x - x * x / (2.0 * cv_kb)).exp()
}

/// R_ω in photons / (s · rad/s).
pub fn spectral_rate_omega(omega: f64, t_m: f64, cs: &CrossSectionTable, cv: &HeatCapacity) -> f64 {
    if !(omega > 0.0) || !(t_m > 0.0) {
        return 0.0;
    }
    let sigma = cs.sigma_at(wavelength_nm_from_omega(omega));
    if sigma == 0.0 {
        return 0.0;
    }
    let energy_ev = HBAR * omega / EV_J;
    omega * omega / (PI * PI * SPEED_OF_LIGHT * SPEED_OF_LIGHT) * sigma * boltzmann_factor(energy_ev, t_m, cv.at(t_m))
}

/// R_λ in photons / (s · nm).
pub fn spectral_rate_lambda(lambda_nm: f64, t_m: f64, cs: &CrossSectionTable, cv: &HeatCapacity) -> f64 {
    if !(lambda_nm > 0.0) {
        return 0.0;
    }
    let lambda_m = lambda_nm * 1e-9;
    let jacobian_per_nm = 2.0 * PI * SPEED_OF_LIGHT / (lambda_m * lambda_m) * 1e-9;
    spectral_rate_omega(omega_from_wavelength_nm(lambda_nm), t_m, cs, cv) * jacobian_per_nm
}

/// Pure-Boltzmann counterpart of [`spectral_rate_omega`], without the
/// finite-heat-bath correction.
pub fn canonical_rate_omega(omega: f64, t_m: f64, cs: &CrossSectionTable) -> f64 {
    if !(omega > 0.0) || !(t_m > 0.0) {
        return 0.0;
    }
    let sigma = cs.sigma_at(wavelength_nm_from_omega(omega));
    let x = HBAR * omega / EV_J / (BOLTZMANN_EV * t_m);
    omega * omega / (PI * PI * SPEED_OF_LIGHT * SPEED_OF_LIGHT) * sigma * (-x).exp()
}

fn quad_opts() -> QuadOptions {
    QuadOptions {
        abs_tol: 0.0,
        rel_tol: 1e-11,
        max_intervals: 4000,
    }
}

/// Total emission rate (photons/s) by adaptive quadrature over the
/// emitting support.
pub fn total_rate(t_m: f64, cs: &CrossSectionTable, cv: &HeatCapacity) -> Result<f64> {
    if !(t_m > 0.0) {
        return Ok(0.0);
    }
    let r = integrate_piecewise(
        |l| spectral_rate_lambda(l, t_m, cs, cv),
        &cs.breakpoints_nm(),
        quad_opts(),
    )?;
    Ok(r.value)
}

/// Emission rate (photons/s) within `[lo_nm, hi_nm]`, adaptive quadrature.
pub fn band_rate(t_m: f64, lo_nm: f64, hi_nm: f64, cs: &CrossSectionTable, cv: &HeatCapacity) -> Result<f64> {
    if !(t_m > 0.0) {
        return Ok(0.0);
    }
    let breaks = clip_breaks(&cs.breakpoints_nm(), lo_nm, hi_nm);
    let r = integrate_piecewise(|l| spectral_rate_lambda(l, t_m, cs, cv), &breaks, quad_opts())?;
    Ok(r.value)
}

/// Radiated power ∫ħω R_ω dω in watts, adaptive quadrature.
pub fn radiated_power(t_m: f64, cs: &CrossSectionTable, cv: &HeatCapacity) -> Result<f64> {
    if !(t_m > 0.0) {
        return Ok(0.0);
    }
    let r = integrate_piecewise(
        |l| photon_energy_ev(l) * spectral_rate_lambda(l, t_m, cs, cv),
        &cs.breakpoints_nm(),
        quad_opts(),
    )?;
    Ok(r.value * EV_J)
}

fn clip_breaks(breaks: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    if breaks.is_empty() || hi <= lo {
        return Vec::new();
    }
    let a = lo.max(breaks[0]);
    let b = hi.min(breaks[breaks.len() - 1]);
    if b <= a {
        return Vec::new();
    }
    let mut out = vec![a];
    out.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    out.push(b);
    out
}

/// Fixed composite Gauss-Legendre rule over the emitting support.
///
/// Each node carries the temperature-independent part of R_λ, so the rate
/// at a node is `prefactor · exp(−x − x²/(2C_V))`. Used wherever the
/// spectrum has to be integrated many times (trajectories, ODE right-hand
/// sides).
#[derive(Debug, Clone)]
pub struct SpectralGrid {
    lambda_nm: Vec<f64>,
    weight_nm: Vec<f64>,
    prefactor: Vec<f64>,
    energy_ev: Vec<f64>,
}

impl SpectralGrid {
    /// Builds the grid; `extra_breaks` are added as panel boundaries so
    /// that band integrals over them are exact sub-sums.
    pub fn new(cs: &CrossSectionTable, extra_breaks: &[f64]) -> Self {
        let mut breaks = cs.breakpoints_nm();
        if let (Some(&lo), Some(&hi)) = (breaks.first(), breaks.last()) {
            breaks.extend(extra_breaks.iter().copied().filter(|&x| x > lo && x < hi));
            breaks.sort_by(f64::total_cmp);
            breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        }
        let mut refined = Vec::with_capacity(breaks.len() * 2);
        for w in breaks.windows(2) {
            let pieces = ((w[1] - w[0]) / GRID_MAX_PANEL_NM).ceil().max(1.0) as usize;
            for k in 0..pieces {
                refined.push(w[0] + (w[1] - w[0]) * k as f64 / pieces as f64);
            }
        }
        if let Some(&hi) = breaks.last() {
            refined.push(hi);
        }
        let nodes = composite_gauss_legendre(&refined, GRID_ORDER);
        let mut grid = SpectralGrid {
            lambda_nm: Vec::with_capacity(nodes.len()),
            weight_nm: Vec::with_capacity(nodes.len()),
            prefactor: Vec::with_capacity(nodes.len()),
            energy_ev: Vec::with_capacity(nodes.len()),
        };
        for (l, w) in nodes {
            let sigma = cs.sigma_at(l);
            let omega = omega_from_wavelength_nm(l);
            let lambda_m = l * 1e-9;
            let pref = omega * omega / (PI * PI * SPEED_OF_LIGHT * SPEED_OF_LIGHT) * sigma * 2.0 * PI * SPEED_OF_LIGHT
                / (lambda_m * lambda_m)
                * 1e-9;
            grid.lambda_nm.push(l);
            grid.weight_nm.push(w);
            grid.prefactor.push(pref);
            grid.energy_ev.push(photon_energy_ev(l));
        }
        grid
    }

    pub fn len(&self) -> usize {
        self.lambda_nm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda_nm.is_empty()
    }

    pub fn wavelengths_nm(&self) -> &[f64] {
        &self.lambda_nm
    }

    pub fn weights_nm(&self) -> &[f64] {
        &self.weight_nm
    }

    pub fn energies_ev(&self) -> &[f64] {
        &self.energy_ev
    }

    /// Fills `out[i]` with `w_i · R_λ(λ_i, T)`, photons/s per node.
    pub fn node_rates(&self, t_m: f64, cv: &HeatCapacity, out: &mut Vec<f64>) {
        out.clear();
        if !(t_m > 0.0) {
            out.resize(self.len(), 0.0);
            return;
        }
        let inv_kt = 1.0 / (BOLTZMANN_EV * t_m);
        let half_inv_cv = 0.5 / cv.at(t_m);
        out.extend((0..self.len()).map(|i| {
            let x = self.energy_ev[i] * inv_kt;
            self.weight_nm[i] * self.prefactor[i] * (-x - x * x * half_inv_cv).exp()
        }));
    }

    /// Total rate (photons/s) and radiated power (eV/s) in one pass.
    pub fn rate_and_power(&self, t_m: f64, cv: &HeatCapacity) -> (f64, f64) {
        if !(t_m > 0.0) {
            return (0.0, 0.0);
        }
        let inv_kt = 1.0 / (BOLTZMANN_EV * t_m);
        let half_inv_cv = 0.5 / cv.at(t_m);
        let mut rate = 0.0;
        let mut power = 0.0;
        for i in 0..self.len() {
            let x = self.energy_ev[i] * inv_kt;
            let r = self.weight_nm[i] * self.prefactor[i] * (-x - x * x * half_inv_cv).exp();
            rate += r;
            power += r * self.energy_ev[i];
        }
        (rate, power)
    }

    /// Rate (photons/s) from nodes with `lo <= λ <= hi`. Exact as a
    /// quadrature when `lo` and `hi` are panel boundaries.
    pub fn band_rate(&self, t_m: f64, cv: &HeatCapacity, lo_nm: f64, hi_nm: f64) -> f64 {
        if !(t_m > 0.0) {
            return 0.0;
        }
        let inv_kt = 1.0 / (BOLTZMANN_EV * t_m);
        let half_inv_cv = 0.5 / cv.at(t_m);
        (0..self.len())
            .filter(|&i| self.lambda_nm[i] >= lo_nm && self.lambda_nm[i] <= hi_nm)
            .map(|i| {
                let x = self.energy_ev[i] * inv_kt;
                self.weight_nm[i] * self.prefactor[i] * (-x - x * x * half_inv_cv).exp()
            })
            .sum()
    }
}

struct ModelInner {
    table: CrossSectionTable,
    cv: HeatCapacity,
    grid: SpectralGrid,
    band_nm: (f64, f64),
}

/// Cross-section, heat capacity and precomputed spectral grid bundled
/// together. Cheap to clone.
#[derive(Clone)]
pub struct EmissionModel {
    inner: Arc<ModelInner>,
}

impl std::fmt::Debug for EmissionModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EmissionModel")
            .field("cv", &self.inner.cv)
            .field("grid_nodes", &self.inner.grid.len())
            .field("band_nm", &self.inner.band_nm)
            .finish()
    }
}

/// Default band counted as "visible" photons, nm.
pub const VISIBLE_BAND_NM: (f64, f64) = (400.0, 800.0);

impl EmissionModel {
    pub fn new(table: CrossSectionTable, cv: HeatCapacity) -> Result<Self> {
        Self::with_band(table, cv, VISIBLE_BAND_NM)
    }

    /// As [`EmissionModel::new`] with a custom band for photon counting.
    pub fn with_band(table: CrossSectionTable, cv: HeatCapacity, band_nm: (f64, f64)) -> Result<Self> {
        cv.validate()?;
        if !(band_nm.0 >= 0.0 && band_nm.1 > band_nm.0) {
            return Err(Error::invalid(format!(
                "photon band must satisfy 0 <= lo < hi, got {band_nm:?}"
            )));
        }
        let grid = SpectralGrid::new(&table, &[band_nm.0, band_nm.1]);
        Ok(Self {
            inner: Arc::new(ModelInner {
                table,
                cv,
                grid,
                band_nm,
            }),
        })
    }

    pub fn table(&self) -> &CrossSectionTable {
        &self.inner.table
    }

    pub fn heat_capacity(&self) -> &HeatCapacity {
        &self.inner.cv
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.inner.grid
    }

    pub fn band_nm(&self) -> (f64, f64) {
        self.inner.band_nm
    }

    pub fn spectral_rate_omega(&self, omega: f64, t_m: f64) -> f64 {
        spectral_rate_omega(omega, t_m, &self.inner.table, &self.inner.cv)
    }

    pub fn spectral_rate_lambda(&self, lambda_nm: f64, t_m: f64) -> f64 {
        spectral_rate_lambda(lambda_nm, t_m, &self.inner.table, &self.inner.cv)
    }

    /// Adaptive-quadrature total rate, photons/s.
    pub fn total_rate(&self, t_m: f64) -> Result<f64> {
        total_rate(t_m, &self.inner.table, &self.inner.cv)
    }

    /// Adaptive-quadrature radiated power, W.
    pub fn radiated_power(&self, t_m: f64) -> Result<f64> {
        radiated_power(t_m, &self.inner.table, &self.inner.cv)
    }

    /// Rate inside the configured photon band, photons/s (grid rule).
    pub fn band_rate(&self, t_m: f64) -> f64 {
        let (lo, hi) = self.inner.band_nm;
        self.inner.grid.band_rate(t_m, &self.inner.cv, lo, hi)
    }

    /// Total rate and normalised spectral density at `t_m`.
    ///
    /// Fails with [`Error::DegenerateSpectrum`] when nothing is emitted;
    /// callers wanting "no emission" semantics use
    /// [`EmissionModel::density_or_empty`].
    pub fn total_rate_and_density(&self, t_m: f64) -> Result<SpectralDensity> {
        let d = self.density_or_empty(t_m);
        if d.is_empty() {
            return Err(Error::DegenerateSpectrum { temperature_k: t_m });
        }
        Ok(d)
    }

    pub fn density_or_empty(&self, t_m: f64) -> SpectralDensity {
        let mut rates = Vec::new();
        self.inner.grid.node_rates(t_m, &self.inner.cv, &mut rates);
        let total: f64 = rates.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return SpectralDensity::empty(t_m);
        }
        for r in &mut rates {
            *r /= total;
        }
        SpectralDensity::from_model(self.clone(), t_m, total, rates)
    }
}

/// Free-function form of [`EmissionModel::total_rate_and_density`].
pub fn total_rate_and_density(t_m: f64, model: &EmissionModel) -> Result<SpectralDensity> {
    model.total_rate_and_density(t_m)
}
