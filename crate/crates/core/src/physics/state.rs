use serde::{Deserialize, Serialize};

use crate::constants::BOLTZMANN_EV;
use crate::error::{Error, Result};

/// Vibrational internal energy of one molecule, in eV.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct InternalState {
    energy_ev: f64,
}

impl InternalState {
    pub fn new(energy_ev: f64) -> Result<Self> {
        if !energy_ev.is_finite() || energy_ev < 0.0 {
            return Err(Error::invalid(format!(
                "internal energy must be finite and >= 0, got {energy_ev}"
            )));
        }
        Ok(Self { energy_ev })
    }

    /// Clamps tiny negative round-off to zero.
    pub(crate) fn saturating(energy_ev: f64) -> Self {
        Self {
            energy_ev: energy_ev.max(0.0),
        }
    }

    pub fn from_temperature(temperature_k: f64, cv: &HeatCapacity) -> Result<Self> {
        Self::new(cv.energy_ev(temperature_k))
    }

    pub fn energy_ev(&self) -> f64 {
        self.energy_ev
    }
}

/// Vibrational heat capacity in units of k_B.
///
/// The default is the constant 202 k_B of C70. A linear temperature slope
/// can be configured, `C_V(T) = constant + slope * T`, in which case the
/// energy-temperature relation becomes quadratic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeatCapacity {
    #[serde(rename = "heat_capacity_kb")]
    pub constant_kb: f64,
    #[serde(default, rename = "heat_capacity_slope_kb_per_k")]
    pub slope_kb_per_k: f64,
}

impl Default for HeatCapacity {
    fn default() -> Self {
        Self {
            constant_kb: 202.0,
            slope_kb_per_k: 0.0,
        }
    }
}

impl HeatCapacity {
    pub fn constant(kb_units: f64) -> Result<Self> {
        let cv = Self {
            constant_kb: kb_units,
            slope_kb_per_k: 0.0,
        };
        cv.validate()?;
        Ok(cv)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.constant_kb > 0.0 && self.constant_kb.is_finite()) {
            return Err(Error::invalid(format!(
                "heat capacity must be > 0, got {} k_B",
                self.constant_kb
            )));
        }
        if !self.slope_kb_per_k.is_finite() || self.slope_kb_per_k < 0.0 {
            return Err(Error::invalid("heat capacity slope must be finite and >= 0"));
        }
        Ok(())
    }

    /// C_V at temperature `t_k`, in units of k_B.
    pub fn at(&self, t_k: f64) -> f64 {
        self.constant_kb + self.slope_kb_per_k * t_k
    }

    /// Internal energy (eV) at micro-canonical temperature `t_k`.
    pub fn energy_ev(&self, t_k: f64) -> f64 {
        BOLTZMANN_EV * (self.constant_kb * t_k + 0.5 * self.slope_kb_per_k * t_k * t_k)
    }

    /// Inverse of [`HeatCapacity::energy_ev`].
    pub fn temperature_k(&self, energy_ev: f64) -> f64 {
        let e = energy_ev.max(0.0) / BOLTZMANN_EV;
        if self.slope_kb_per_k == 0.0 {
            e / self.constant_kb
        } else {
            let c0 = self.constant_kb;
            let c1 = self.slope_kb_per_k;
            // Rationalised root of c1/2 T^2 + c0 T - e = 0, stable for small c1.
            2.0 * e / (c0 + (c0 * c0 + 2.0 * c1 * e).sqrt())
        }
    }

    /// dE/dT in eV/K.
    pub fn de_dt_ev(&self, t_k: f64) -> f64 {
        BOLTZMANN_EV * self.at(t_k)
    }
}

/// Micro-canonical temperature (K) of a molecule with the given internal
/// energy.
pub fn micro_temperature(state: &InternalState, cv: &HeatCapacity) -> f64 {
    cv.temperature_k(state.energy_ev())
}
