use serde::{Deserialize, Serialize};

use crate::constants::{AMU_KG, C70_MASS_AMU, PLANCK};
use crate::error::{Error, Result};

/// Three identical, equally spaced binary gratings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InterferometerGeometry {
    pub period_nm: f64,
    pub slit_width_nm: f64,
    /// Distance between neighbouring gratings, m.
    pub separation_m: f64,
    pub molecule_mass_kg: f64,
}

impl Default for InterferometerGeometry {
    fn default() -> Self {
        Self {
            period_nm: 991.0,
            slit_width_nm: 475.0,
            separation_m: 0.38,
            molecule_mass_kg: C70_MASS_AMU * AMU_KG,
        }
    }
}

impl InterferometerGeometry {
    pub fn validate(&self) -> Result<()> {
        if !(self.period_nm > 0.0 && self.period_nm.is_finite()) {
            return Err(Error::invalid(format!(
                "grating period must be > 0, got {}",
                self.period_nm
            )));
        }
        if !(self.slit_width_nm > 0.0 && self.slit_width_nm < self.period_nm) {
            return Err(Error::invalid(format!(
                "slit width must lie in (0, {}) nm, got {}",
                self.period_nm, self.slit_width_nm
            )));
        }
        if !(self.separation_m > 0.0 && self.separation_m.is_finite()) {
            return Err(Error::invalid(format!(
                "grating separation must be > 0, got {}",
                self.separation_m
            )));
        }
        if !(self.molecule_mass_kg > 0.0 && self.molecule_mass_kg.is_finite()) {
            return Err(Error::invalid("molecule mass must be > 0"));
        }
        Ok(())
    }

    /// Slit width over period.
    pub fn open_fraction(&self) -> f64 {
        self.slit_width_nm / self.period_nm
    }

    /// Time from the first to the third grating, s.
    pub fn transit_time_s(&self, v: f64) -> f64 {
        2.0 * self.separation_m / v
    }

    /// Talbot length d²/λ_dB at speed `v`, m.
    pub fn talbot_length_m(&self, v: f64) -> f64 {
        let d = self.period_nm * 1e-9;
        d * d * self.molecule_mass_kg * v / PLANCK
    }

    /// Separation of the two interfering paths for harmonic `l` at time
    /// `t` after the first grating, nm. Zero at the first and third
    /// gratings, largest at the second.
    pub fn path_separation_nm(&self, l: f64, t: f64, v: f64) -> f64 {
        let big_l = self.separation_m;
        let z = (big_l - (v * t - big_l).abs()).max(0.0);
        l * self.period_nm * z / self.talbot_length_m(v)
    }
}

/// de Broglie wavelength (pm) and Talbot length (m) at speed `v`.
pub fn de_broglie_and_talbot(geometry: &InterferometerGeometry, v: f64) -> Result<(f64, f64)> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::invalid(format!("velocity must be > 0, got {v}")));
    }
    let lambda_m = PLANCK / (geometry.molecule_mass_kg * v);
    let d = geometry.period_nm * 1e-9;
    Ok((lambda_m * 1e12, d * d / lambda_m))
}
