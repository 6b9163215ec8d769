use std::ops::ControlFlow;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson};

use crate::error::{Error, Result};
use crate::heating::config::{mean_absorbed_photons_offset, HeatingStageConfig};
use crate::heating::trajectory::{Absorption, TemperatureTrajectory};
use crate::numerics::ode::{integrate, OdeOptions};
use crate::physics::cooling::{cooling_options, RadiativeLoss};
use crate::physics::{CoolingTable, EmissionModel};

/// Exposure is integrated in picoseconds to keep it well above the
/// integrator's absolute tolerance.
const EXPOSURE_SCALE: f64 = 1e12;

/// Heating stage bound to a cooling model.
#[derive(Debug, Clone)]
pub struct HeatingStage {
    cfg: HeatingStageConfig,
    loss: Arc<CoolingTable>,
}

enum Record {
    /// Every accepted integrator step.
    Steps,
    /// Only the end point.
    End,
}

impl HeatingStage {
    pub fn new(cfg: HeatingStageConfig, model: &EmissionModel) -> Result<Self> {
        Self::with_table(cfg, Arc::new(CoolingTable::new(model)))
    }

    pub fn with_table(cfg: HeatingStageConfig, loss: Arc<CoolingTable>) -> Result<Self> {
        cfg.validate()?;
        Ok(Self { cfg, loss })
    }

    pub fn config(&self) -> &HeatingStageConfig {
        &self.cfg
    }

    pub fn cooling_table(&self) -> &Arc<CoolingTable> {
        &self.loss
    }

    /// Initial internal energy, thermal at the oven temperature, eV.
    pub fn initial_energy_ev(&self) -> f64 {
        self.loss.heat_capacity().energy_ev(self.cfg.initial_temperature_k)
    }

    /// Runs one molecule from the first beam to the first grating (t = 0).
    ///
    /// Random draws, in order: ionization threshold, transverse position
    /// (only with a non-zero spread), one uniform per beam. Photon counts
    /// come from inverting the Poisson CDF with that uniform, so the same
    /// stream gives counts that never decrease with laser power.
    pub fn traverse<R: Rng + ?Sized>(
        &self,
        v: f64,
        initial_energy_ev: f64,
        rng: &mut R,
    ) -> Result<TemperatureTrajectory> {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::invalid(format!("velocity must be > 0, got {v}")));
        }
        if !(initial_energy_ev >= 0.0 && initial_energy_ev.is_finite()) {
            return Err(Error::invalid("initial energy must be >= 0"));
        }
        let cfg = &self.cfg;
        let mut traj = TemperatureTrajectory::empty(v);
        let u: f64 = rng.random();
        traj.ionization_threshold = -(1.0 - u).ln();
        let offset = if cfg.transverse_spread_um > 0.0 {
            Normal::new(0.0, cfg.transverse_spread_um)
                .expect("validated spread")
                .sample(rng)
        } else {
            0.0
        } + cfg.beam_offset_um;

        let (_, stage_end) = cfg.stage_window_s(v);
        let stage_end = stage_end.min(0.0);
        let mut e = initial_energy_ev;
        let mut t = cfg.beam_time_s(0, v);
        traj.push_sample(t, e);
        let mut exposure = 0.0;
        for (k, beam) in cfg.beams.iter().enumerate() {
            let tk = cfg.beam_time_s(k, v);
            if tk > t {
                let y = self.advance(&mut traj, t, tk, e, Record::Steps)?;
                e = y[0];
                exposure += y[1];
                t = tk;
            }
            let mean = mean_absorbed_photons_offset(beam, v, cfg.triplet_sigma_cm2, offset);
            let photons = poisson_count(mean, rng)?;
            if photons > 0 {
                traj.absorptions.push(Absorption {
                    time_s: tk,
                    beam: k,
                    photons,
                    energy_before_ev: e,
                });
                e += photons as f64 * beam.photon_energy_ev();
                traj.set_last_energy(e);
            }
            traj.peak_stage_energy_ev = traj.peak_stage_energy_ev.max(e);
        }
        if stage_end > t {
            let y = self.advance(&mut traj, t, stage_end, e, Record::Steps)?;
            e = y[0];
            exposure += y[1];
            t = stage_end;
        }
        traj.stage_exposure_s = exposure;
        traj.total_exposure_s = exposure;
        if t < 0.0 {
            let y = self.advance(&mut traj, t, 0.0, e, Record::Steps)?;
            traj.total_exposure_s += y[1];
        }
        let a = cfg.ionization.prefactor_per_s;
        traj.ionized_in_stage = a * traj.stage_exposure_s >= traj.ionization_threshold;
        traj.survived = a * traj.total_exposure_s < traj.ionization_threshold;
        traj.survival_probability = (-a * traj.total_exposure_s).exp();
        Ok(traj)
    }

    /// Continues cooling from the end of `traj` to `t_end`, appending
    /// `intervals` equal steps. Used to carry a trajectory through the
    /// interferometer.
    pub fn extend(&self, traj: &mut TemperatureTrajectory, t_end: f64, intervals: usize) -> Result<()> {
        let t0 = traj.end_time();
        if t_end <= t0 {
            return Ok(());
        }
        let n = intervals.max(1);
        let mut e = traj.final_energy_ev();
        let mut t = t0;
        for i in 1..=n {
            let ti = if i == n {
                t_end
            } else {
                t0 + (t_end - t0) * i as f64 / n as f64
            };
            let y = self.advance(traj, t, ti, e, Record::End)?;
            e = y[0];
            traj.total_exposure_s += y[1];
            t = ti;
        }
        let a = self.cfg.ionization.prefactor_per_s;
        traj.survived = a * traj.total_exposure_s < traj.ionization_threshold;
        traj.survival_probability = (-a * traj.total_exposure_s).exp();
        Ok(())
    }

    /// Integrates [E, exposure, radiated] over `[t0, t1]` starting from
    /// energy `e0`; returns the end energy and the exposure gained, and adds
    /// the radiated energy to the trajectory ledger.
    fn advance(&self, traj: &mut TemperatureTrajectory, t0: f64, t1: f64, e0: f64, record: Record) -> Result<[f64; 2]> {
        let loss = &*self.loss;
        let cv = *loss.heat_capacity();
        let ion = self.cfg.ionization;
        let mut y = [e0, 0.0, 0.0];
        let opts = OdeOptions {
            atol: 1e-10,
            ..cooling_options()
        };
        let rhs = |_: f64, y: &[f64], d: &mut [f64]| {
            let temp = cv.temperature_k(y[0].max(0.0));
            let p = loss.power_ev_per_s(temp);
            d[0] = -p;
            d[1] = ion.boltzmann(temp) * EXPOSURE_SCALE;
            d[2] = p;
        };
        match record {
            Record::Steps => {
                let mut pts = Vec::new();
                integrate(rhs, t0, t1, &mut y, &opts, |t, y| {
                    pts.push((t, y[0]));
                    ControlFlow::Continue(())
                })?;
                for (t, e) in pts {
                    traj.push_sample(t, e);
                }
            }
            Record::End => {
                integrate(rhs, t0, t1, &mut y, &opts, |_, _| ControlFlow::Continue(()))?;
                traj.push_sample(t1, y[0]);
            }
        }
        traj.radiated_ev += y[2];
        Ok([y[0].max(0.0), y[1] / EXPOSURE_SCALE])
    }
}

/// Poisson variate by CDF inversion of one uniform; falls back to the
/// library sampler where e^−mean underflows.
fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> Result<u32> {
    let u: f64 = rng.random();
    if !(mean > 0.0) {
        return Ok(0);
    }
    if mean > 500.0 {
        let p = Poisson::new(mean).map_err(|err| Error::invalid(format!("photon mean {mean}: {err}")))?;
        return Ok(p.sample(rng) as u32);
    }
    let mut k = 0u32;
    let mut p = (-mean).exp();
    let mut cdf = p;
    while u > cdf && p > 0.0 {
        k += 1;
        p *= mean / k as f64;
        cdf += p;
    }
    Ok(k)
}

/// Runs one molecule through the stage described by `cfg`, starting from
/// `initial_energy_ev`. Builds a fresh cooling table on every call; hold a
/// [`HeatingStage`] to amortise it over an ensemble.
pub fn traverse_stage<R: Rng + ?Sized>(
    v: f64,
    cfg: &HeatingStageConfig,
    initial_energy_ev: f64,
    model: &EmissionModel,
    rng: &mut R,
) -> Result<TemperatureTrajectory> {
    HeatingStage::new(cfg.clone(), model)?.traverse(v, initial_energy_ev, rng)
}
