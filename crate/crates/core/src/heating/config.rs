use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::constants::{photon_energy_ev, EV_J};
use crate::error::{Error, Result};

pub const MAX_BEAMS: usize = 16;

/// One pass of the molecular beam through a focused heating laser.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaserBeam {
    pub power_w: f64,
    #[serde(default = "default_waist")]
    pub waist_um: f64,
    #[serde(default = "default_wavelength")]
    pub wavelength_nm: f64,
}

fn default_waist() -> f64 {
    40.0
}

fn default_wavelength() -> f64 {
    514.5
}

impl LaserBeam {
    pub fn new(power_w: f64) -> Self {
        Self {
            power_w,
            waist_um: default_waist(),
            wavelength_nm: default_wavelength(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.power_w >= 0.0 && self.power_w.is_finite()) {
            return Err(Error::invalid(format!(
                "laser power must be >= 0 W, got {}",
                self.power_w
            )));
        }
        if !(self.waist_um > 0.0 && self.waist_um.is_finite()) {
            return Err(Error::invalid(format!(
                "beam waist must be > 0, got {} um",
                self.waist_um
            )));
        }
        if !(self.wavelength_nm > 0.0 && self.wavelength_nm.is_finite()) {
            return Err(Error::invalid("laser wavelength must be > 0"));
        }
        Ok(())
    }

    pub fn photon_energy_ev(&self) -> f64 {
        photon_energy_ev(self.wavelength_nm)
    }
}

/// Thermally activated ionization, rate `A · exp(−E_a / k_B T)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IonizationModel {
    pub prefactor_per_s: f64,
    pub activation_energy_ev: f64,
}

impl Default for IonizationModel {
    fn default() -> Self {
        Self {
            prefactor_per_s: 5e9,
            activation_energy_ev: 7.6,
        }
    }
}

impl IonizationModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.prefactor_per_s > 0.0 && self.prefactor_per_s.is_finite()) {
            return Err(Error::invalid("ionization prefactor must be > 0"));
        }
        if !(self.activation_energy_ev > 0.0 && self.activation_energy_ev.is_finite()) {
            return Err(Error::invalid("ionization activation energy must be > 0"));
        }
        Ok(())
    }

    /// exp(−E_a / k_B T), the prefactor-free part of the rate.
    pub fn boltzmann(&self, t_m: f64) -> f64 {
        if !(t_m > 0.0) {
            return 0.0;
        }
        (-self.activation_energy_ev / (crate::constants::BOLTZMANN_EV * t_m)).exp()
    }

    /// Ionization rate, 1/s.
    pub fn rate(&self, t_m: f64) -> f64 {
        self.prefactor_per_s * self.boltzmann(t_m)
    }
}

/// Geometry and parameters of the multi-pass heating stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeatingStageConfig {
    pub beams: Vec<LaserBeam>,
    pub beam_spacing_mm: f64,
    /// Distance from the last beam to the first grating.
    pub drift_cm: f64,
    pub triplet_sigma_cm2: f64,
    pub ionization: IonizationModel,
    pub initial_temperature_k: f64,
    /// Fixed displacement of every laser focus from the molecular beam axis.
    #[serde(default)]
    pub beam_offset_um: f64,
    /// RMS transverse position of molecules relative to the axis (Gaussian);
    /// 0 puts every molecule on axis.
    #[serde(default)]
    pub transverse_spread_um: f64,
}

impl Default for HeatingStageConfig {
    fn default() -> Self {
        Self {
            beams: vec![LaserBeam::new(0.0); MAX_BEAMS],
            beam_spacing_mm: 0.3,
            drift_cm: 7.2,
            triplet_sigma_cm2: 2e-17,
            ionization: IonizationModel::default(),
            initial_temperature_k: 900.0,
            beam_offset_um: 0.0,
            transverse_spread_um: 0.0,
        }
    }
}

impl HeatingStageConfig {
    /// `count` identical beams of `power_w` each, other parameters default.
    pub fn uniform(count: usize, power_w: f64) -> Self {
        Self {
            beams: vec![LaserBeam::new(power_w); count],
            ..Self::default()
        }
    }

    /// Copy with every beam set to `power_w`.
    pub fn with_power(&self, power_w: f64) -> Self {
        let mut c = self.clone();
        for b in &mut c.beams {
            b.power_w = power_w;
        }
        c
    }

    pub fn validate(&self) -> Result<()> {
        if self.beams.is_empty() || self.beams.len() > MAX_BEAMS {
            return Err(Error::invalid(format!(
                "heating stage needs 1..={MAX_BEAMS} beams, got {}",
                self.beams.len()
            )));
        }
        for b in &self.beams {
            b.validate()?;
        }
        if !(self.beam_spacing_mm > 0.0 && self.beam_spacing_mm.is_finite()) {
            return Err(Error::invalid("beam spacing must be > 0"));
        }
        if !(self.drift_cm >= 0.0 && self.drift_cm.is_finite()) {
            return Err(Error::invalid("drift length must be >= 0"));
        }
        if !(self.triplet_sigma_cm2 >= 0.0 && self.triplet_sigma_cm2.is_finite()) {
            return Err(Error::invalid("triplet cross-section must be >= 0"));
        }
        if !(self.initial_temperature_k >= 0.0 && self.initial_temperature_k.is_finite()) {
            return Err(Error::invalid("initial temperature must be >= 0"));
        }
        if !self.beam_offset_um.is_finite()
            || !(self.transverse_spread_um >= 0.0 && self.transverse_spread_um.is_finite())
        {
            return Err(Error::invalid("beam offset must be finite and transverse spread >= 0"));
        }
        self.ionization.validate()
    }

    /// Time of the `k`-th beam crossing relative to arrival at the first
    /// grating (negative).
    pub fn beam_time_s(&self, k: usize, v: f64) -> f64 {
        let n = self.beams.len();
        let spacing = self.beam_spacing_mm * 1e-3;
        -(self.drift_cm * 1e-2 + (n - 1 - k) as f64 * spacing) / v
    }

    /// Window within which ions count towards the stage (D1) yield: first
    /// beam to one spacing past the last beam.
    pub fn stage_window_s(&self, v: f64) -> (f64, f64) {
        let last = self.beam_time_s(self.beams.len() - 1, v);
        (self.beam_time_s(0, v), last + self.beam_spacing_mm * 1e-3 / v)
    }
}

/// Mean number of photons absorbed in one pass through `beam` at speed `v`
/// (m/s) on axis, for a triplet cross-section `sigma_cm2`.
///
/// The fluence line integral through a Gaussian focus of waist w gives
/// n̄ = σ P √(2/π) / (w v E_ph).
pub fn mean_absorbed_photons(beam: &LaserBeam, v: f64, sigma_cm2: f64) -> f64 {
    if !(v > 0.0) {
        return 0.0;
    }
    let sigma_m2 = sigma_cm2 * 1e-4;
    let w = beam.waist_um * 1e-6;
    let e_ph = beam.photon_energy_ev() * EV_J;
    sigma_m2 * beam.power_w * (2.0 / std::f64::consts::PI).sqrt() / (w * v * e_ph)
}

/// As [`mean_absorbed_photons`] for a molecule passing at transverse
/// distance `offset_um` from the beam axis.
pub fn mean_absorbed_photons_offset(beam: &LaserBeam, v: f64, sigma_cm2: f64, offset_um: f64) -> f64 {
    let w = beam.waist_um;
    mean_absorbed_photons(beam, v, sigma_cm2) * (-2.0 * offset_um * offset_um / (w * w)).exp()
}

/// Gaussian forward-velocity distribution. Draws below a tenth of the mean
/// are rejected and redrawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VelocityDistribution {
    pub mean_mps: f64,
    #[serde(default = "default_spread")]
    pub relative_spread: f64,
}

fn default_spread() -> f64 {
    0.15
}

impl VelocityDistribution {
    pub fn new(mean_mps: f64, relative_spread: f64) -> Result<Self> {
        let d = Self {
            mean_mps,
            relative_spread,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn fixed(v: f64) -> Self {
        Self {
            mean_mps: v,
            relative_spread: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mean_mps > 0.0 && self.mean_mps.is_finite()) {
            return Err(Error::invalid(format!(
                "mean velocity must be > 0, got {}",
                self.mean_mps
            )));
        }
        if !(self.relative_spread >= 0.0 && self.relative_spread.is_finite()) {
            return Err(Error::invalid("velocity spread must be >= 0"));
        }
        Ok(())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.relative_spread == 0.0 {
            return self.mean_mps;
        }
        let normal = Normal::new(self.mean_mps, self.relative_spread * self.mean_mps).expect("validated spread");
        loop {
            let v = normal.sample(rng);
            if v >= 0.1 * self.mean_mps {
                return v;
            }
        }
    }
}
