use crate::error::{Error, Result};
use crate::interferometer::coefficients::FringeCoefficients;
use crate::interferometer::geometry::InterferometerGeometry;
use crate::physics::{sinc, SpectralDensity};

/// η(Δr) = ⟨sinc(2πΔr/λ)⟩ over the photon-wavelength density; 1 for an
/// empty density.
pub fn decoherence_function(delta_r_nm: f64, density: &SpectralDensity) -> Result<f64> {
    if !(delta_r_nm >= 0.0 && delta_r_nm.is_finite()) {
        return Err(Error::invalid(format!(
            "path separation must be >= 0, got {delta_r_nm}"
        )));
    }
    Ok(density.decoherence(delta_r_nm))
}

/// 1 − sin(x)/x without cancellation at small x.
pub fn one_minus_sinc(x: f64) -> f64 {
    if x.abs() < 1e-2 {
        let x2 = x * x;
        x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0))
    } else {
        1.0 - sinc(x)
    }
}

/// One emitted photon inside the interferometer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmissionEvent {
    /// Time after passing the first grating, s.
    pub time_s: f64,
    pub wavelength_nm: f64,
}

impl EmissionEvent {
    pub fn new(time_s: f64, wavelength_nm: f64) -> Result<Self> {
        if !(wavelength_nm > 0.0 && wavelength_nm.is_finite()) {
            return Err(Error::invalid(format!(
                "photon wavelength must be > 0, got {wavelength_nm}"
            )));
        }
        if !time_s.is_finite() {
            return Err(Error::invalid("emission time must be finite"));
        }
        Ok(Self { time_s, wavelength_nm })
    }
}

/// Coefficients after one emission: C_ℓ·sinc(2πΔr_ℓ/λ) with Δr_ℓ the
/// path separation of harmonic ℓ at the emission point.
pub fn apply_single_emission(
    c: &FringeCoefficients,
    event: &EmissionEvent,
    v: f64,
    geometry: &InterferometerGeometry,
) -> Result<FringeCoefficients> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::invalid(format!("velocity must be > 0, got {v}")));
    }
    let window = geometry.transit_time_s(v);
    if !(0.0..=window).contains(&event.time_s) {
        return Err(Error::invalid(format!(
            "emission at t = {:e} s lies outside the transit window [0, {window:e}] s",
            event.time_s
        )));
    }
    let k = 2.0 * std::f64::consts::PI / event.wavelength_nm;
    Ok(c.scaled_by(|l| sinc(k * geometry.path_separation_nm(l as f64, event.time_s, v))))
}
