//! Physical constants (CODATA 2018 exact/recommended values) and photon
//! unit conversions.
//!
//! Energies are carried in eV and lengths in SI throughout the crate, with
//! the exception of wavelengths, which public APIs take in nanometres.

use std::f64::consts::PI;

/// Planck constant, J·s.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Reduced Planck constant, J·s. Derived from [`PLANCK`] so that ħω and
/// hc/λ agree to the last bit.
pub const HBAR: f64 = PLANCK / (2.0 * PI);
/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Boltzmann constant, J/K.
pub const BOLTZMANN_J: f64 = 1.380_649e-23;
/// Elementary charge, J per eV.
pub const EV_J: f64 = 1.602_176_634e-19;
/// Boltzmann constant, eV/K.
pub const BOLTZMANN_EV: f64 = BOLTZMANN_J / EV_J;
/// Atomic mass unit, kg.
pub const AMU_KG: f64 = 1.660_539_066_60e-27;
/// Mass of a C70 molecule, amu.
pub const C70_MASS_AMU: f64 = 840.77;

/// Bundle of the constants entering the emission law, for callers that
/// prefer a value over free constants (e.g. across the C ABI).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    pub hbar: f64,
    pub c: f64,
    pub k_b_j: f64,
    pub k_b_ev: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Self {
            hbar: HBAR,
            c: SPEED_OF_LIGHT,
            k_b_j: BOLTZMANN_J,
            k_b_ev: BOLTZMANN_EV,
        }
    }
}

/// Angular frequency (rad/s) of light with vacuum wavelength `lambda_nm`.
pub fn omega_from_wavelength_nm(lambda_nm: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / (lambda_nm * 1e-9)
}

/// Vacuum wavelength (nm) of light with angular frequency `omega`.
pub fn wavelength_nm_from_omega(omega: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / omega * 1e9
}

/// Photon energy in eV for a vacuum wavelength in nm.
pub fn photon_energy_ev(lambda_nm: f64) -> f64 {
    PLANCK * SPEED_OF_LIGHT / (lambda_nm * 1e-9) / EV_J
}

/// Vacuum wavelength in nm of a photon with energy `energy_ev`.
pub fn wavelength_nm_from_energy_ev(energy_ev: f64) -> f64 {
    PLANCK * SPEED_OF_LIGHT / (energy_ev * EV_J) * 1e9
}
