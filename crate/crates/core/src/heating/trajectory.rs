use crate::error::{Error, Result};
use crate::physics::HeatCapacity;

/// Photons taken up in one beam crossing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Absorption {
    pub time_s: f64,
    pub beam: usize,
    pub photons: u32,
    /// Internal energy just before the crossing.
    pub energy_before_ev: f64,
}

/// Internal-energy history of one molecule. Time zero is the arrival at the
/// first grating; heating-stage times are negative.
///
/// At a beam crossing the sample holds the energy after absorption; the
/// energy just before it is kept in the matching [`Absorption`].
#[derive(Debug, Clone, PartialEq)]
pub struct TemperatureTrajectory {
    velocity_mps: f64,
    samples: Vec<(f64, f64)>,
    pub(crate) absorptions: Vec<Absorption>,
    pub(crate) survived: bool,
    pub(crate) ionized_in_stage: bool,
    /// ∫exp(−E_a/kT) dt over the stage window and over the whole path, s.
    pub(crate) stage_exposure_s: f64,
    pub(crate) total_exposure_s: f64,
    pub(crate) radiated_ev: f64,
    pub(crate) peak_stage_energy_ev: f64,
    pub(crate) ionization_threshold: f64,
    pub(crate) survival_probability: f64,
}

impl TemperatureTrajectory {
    /// Trajectory from explicit `(time_s, energy_ev)` samples.
    pub fn new(velocity_mps: f64, samples: Vec<(f64, f64)>) -> Result<Self> {
        if !(velocity_mps > 0.0 && velocity_mps.is_finite()) {
            return Err(Error::invalid(format!("velocity must be > 0, got {velocity_mps}")));
        }
        if samples.is_empty() {
            return Err(Error::invalid("trajectory needs at least one sample"));
        }
        for w in samples.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::invalid("trajectory times must be strictly increasing"));
            }
        }
        if samples
            .iter()
            .any(|(t, e)| !t.is_finite() || !(e.is_finite() && *e >= 0.0))
        {
            return Err(Error::invalid("trajectory samples must be finite with energy >= 0"));
        }
        let peak = samples.iter().map(|s| s.1).fold(0.0, f64::max);
        Ok(Self {
            velocity_mps,
            samples,
            absorptions: Vec::new(),
            survived: true,
            ionized_in_stage: false,
            stage_exposure_s: 0.0,
            total_exposure_s: 0.0,
            radiated_ev: 0.0,
            peak_stage_energy_ev: peak,
            ionization_threshold: f64::INFINITY,
            survival_probability: 1.0,
        })
    }

    /// Constant energy over `[t0, t1]`.
    pub fn constant(velocity_mps: f64, energy_ev: f64, t0: f64, t1: f64) -> Result<Self> {
        Self::new(velocity_mps, vec![(t0, energy_ev), (t1, energy_ev)])
    }

    /// Piecewise-constant energy: `levels[i]` holds on `[edges[i], edges[i+1])`.
    /// Each jump is represented by two samples a relative 1e-12 apart.
    pub fn piecewise_constant(velocity_mps: f64, edges: &[f64], levels: &[f64]) -> Result<Self> {
        if edges.len() != levels.len() + 1 || levels.is_empty() {
            return Err(Error::invalid(
                "piecewise trajectory needs edges.len() == levels.len() + 1",
            ));
        }
        let span = edges[edges.len() - 1] - edges[0];
        let eps = 1e-12 * span.abs().max(1e-300);
        let mut s = Vec::with_capacity(2 * levels.len());
        for (i, &e) in levels.iter().enumerate() {
            let a = if i == 0 { edges[0] } else { edges[i] + eps };
            s.push((a, e));
            s.push((edges[i + 1], e));
        }
        Self::new(velocity_mps, s)
    }

    pub fn velocity_mps(&self) -> f64 {
        self.velocity_mps
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn absorptions(&self) -> &[Absorption] {
        &self.absorptions
    }

    pub fn absorbed_photons(&self) -> u32 {
        self.absorptions.iter().map(|a| a.photons).sum()
    }

    /// Survived ionization up to the end of the recorded path.
    pub fn survived(&self) -> bool {
        self.survived
    }

    /// Probability of escaping ionization along the recorded path,
    /// exp(−A·∫exp(−E_a/kT) dt); 1 for hand-built trajectories.
    pub fn survival_probability(&self) -> f64 {
        self.survival_probability
    }

    pub fn ionized_in_stage(&self) -> bool {
        self.ionized_in_stage
    }

    /// ∫exp(−E_a/k_BT) dt over the heating-stage window, s. Multiply by the
    /// Arrhenius prefactor for the stage ionization hazard.
    pub fn stage_exposure_s(&self) -> f64 {
        self.stage_exposure_s
    }

    pub fn total_exposure_s(&self) -> f64 {
        self.total_exposure_s
    }

    /// Energy radiated away along the path, eV.
    pub fn radiated_ev(&self) -> f64 {
        self.radiated_ev
    }

    /// Highest internal energy reached within the heating stage, eV.
    pub fn peak_stage_energy_ev(&self) -> f64 {
        self.peak_stage_energy_ev
    }

    pub fn start_time(&self) -> f64 {
        self.samples[0].0
    }

    pub fn end_time(&self) -> f64 {
        self.samples[self.samples.len() - 1].0
    }

    pub fn initial_energy_ev(&self) -> f64 {
        match self.absorptions.first() {
            Some(a) if a.time_s == self.samples[0].0 => a.energy_before_ev,
            _ => self.samples[0].1,
        }
    }

    pub fn final_energy_ev(&self) -> f64 {
        self.samples[self.samples.len() - 1].1
    }

    /// Does the path cover `[t0, t1]`?
    pub fn spans(&self, t0: f64, t1: f64) -> bool {
        self.start_time() <= t0 && self.end_time() >= t1
    }

    /// Energy at time `t` by linear interpolation; clamps outside the path.
    pub fn energy_at(&self, t: f64) -> f64 {
        let s = &self.samples;
        if t <= s[0].0 {
            return s[0].1;
        }
        let n = s.len();
        if t >= s[n - 1].0 {
            return s[n - 1].1;
        }
        let i = s.partition_point(|p| p.0 <= t);
        let (t0, e0) = s[i - 1];
        let (t1, e1) = s[i];
        e0 + (e1 - e0) * (t - t0) / (t1 - t0)
    }

    pub fn temperature_at(&self, t: f64, cv: &HeatCapacity) -> f64 {
        cv.temperature_k(self.energy_at(t))
    }

    /// Sample times strictly inside `(t0, t1)`, for quadrature panel breaks.
    pub fn breaks_within(&self, t0: f64, t1: f64) -> Vec<f64> {
        let mut b = vec![t0];
        b.extend(self.samples.iter().map(|s| s.0).filter(|&t| t > t0 && t < t1));
        b.push(t1);
        b
    }

    pub(crate) fn push_sample(&mut self, t: f64, e: f64) {
        if let Some(last) = self.samples.last_mut() {
            if t <= last.0 {
                // Coincident time (zero-length step): keep the newest value.
                last.1 = e;
                return;
            }
        }
        self.samples.push((t, e.max(0.0)));
    }

    pub(crate) fn set_last_energy(&mut self, e: f64) {
        if let Some(last) = self.samples.last_mut() {
            last.1 = e;
        }
    }

    pub(crate) fn empty(velocity_mps: f64) -> Self {
        Self {
            velocity_mps,
            samples: Vec::new(),
            absorptions: Vec::new(),
            survived: true,
            ionized_in_stage: false,
            stage_exposure_s: 0.0,
            total_exposure_s: 0.0,
            radiated_ev: 0.0,
            peak_stage_energy_ev: 0.0,
            ionization_threshold: f64::INFINITY,
            survival_probability: 1.0,
        }
    }
}
