use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::heating::{fit_heating_params, FitOptions, HeatingFit, HeatingStage, IonYieldObservation};
use crate::interferometer::{
    ensemble_from_decays, Decay, EnsembleVisibility, FringeCoefficients, Harmonics, Interferometer,
};
use crate::numerics::molecule_rng;
use crate::physics::{CoolingTable, EmissionModel};
use crate::pipeline::config::ExperimentConfig;

/// One power point of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub power_w: f64,
    /// Mean micro-canonical temperature at the first grating, K.
    pub mean_entry_temperature_k: f64,
    /// Hottest molecule anywhere in the heating stage, K.
    pub max_stage_temperature_k: f64,
    pub visibility: f64,
    pub visibility_stderr: f64,
    pub baseline_visibility: f64,
    /// Detected molecules per molecule, relative to an unheated beam.
    pub relative_count_rate: f64,
    pub mean_visible_photons: f64,
}

/// Rows ordered by power.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub scenario: String,
    pub rows: Vec<ResultRow>,
}

/// Ensemble outcome at one power, with the averaged pattern kept for
/// fringe scans.
#[derive(Debug, Clone)]
pub struct PowerPoint {
    pub row: ResultRow,
    pub coefficients: FringeCoefficients,
}

/// Shared, power-independent pieces of a run.
pub struct Simulator {
    cfg: ExperimentConfig,
    model: EmissionModel,
    table: Arc<CoolingTable>,
    interferometer: Interferometer,
}

struct Molecule {
    entry_temperature_k: f64,
    peak_temperature_k: f64,
    decay: Decay,
    weight: f64,
}

impl Simulator {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let model = cfg.emission_model()?;
        let table = Arc::new(CoolingTable::new(&model));
        let interferometer = Interferometer::new(
            cfg.interferometer.geometry(),
            model.clone(),
            cfg.interferometer.baseline,
        )?
        .with_pattern_harmonics(cfg.interferometer.pattern_harmonics)?;
        Ok(Self {
            cfg: cfg.clone(),
            model,
            table,
            interferometer,
        })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.cfg
    }

    pub fn model(&self) -> &EmissionModel {
        &self.model
    }

    pub fn interferometer(&self) -> &Interferometer {
        &self.interferometer
    }

    /// Simulates the ensemble at one laser power. Molecule `i` always uses
    /// stream `i` of the master seed, so neighbouring powers share their
    /// random numbers.
    pub fn power_point(&self, power_w: f64) -> Result<PowerPoint> {
        let cfg = &self.cfg;
        let stage = HeatingStage::with_table(cfg.stage.stage(power_w)?, self.table.clone())?;
        let cv = *self.model.heat_capacity();
        let e0 = stage.initial_energy_ev();
        let geometry = *self.interferometer.geometry();
        let harmonics = Harmonics::UpTo(self.interferometer.pattern_harmonics());
        let molecules: Vec<Molecule> = (0..cfg.ensemble_size)
            .into_par_iter()
            .map(|i| {
                let mut rng = molecule_rng(cfg.seed, i as u64);
                let v = cfg.velocity.sample(&mut rng);
                let mut traj = stage.traverse(v, e0, &mut rng)?;
                let entry = traj.final_energy_ev();
                stage.extend(
                    &mut traj,
                    geometry.transit_time_s(v),
                    cfg.interferometer.trajectory_intervals,
                )?;
                let decay = self.interferometer.decay(&traj, harmonics)?;
                let weight = traj.survival_probability() * cfg.detector.efficiency(traj.final_energy_ev(), &cv);
                Ok(Molecule {
                    entry_temperature_k: cv.temperature_k(entry),
                    peak_temperature_k: cv.temperature_k(traj.peak_stage_energy_ev()),
                    decay,
                    weight,
                })
            })
            .collect::<Result<_>>()?;
        let n = molecules.len() as f64;
        let mean_entry = molecules.iter().map(|m| m.entry_temperature_k).sum::<f64>() / n;
        let max_peak = molecules.iter().map(|m| m.peak_temperature_k).fold(0.0, f64::max);
        let weights: Vec<f64> = molecules.iter().map(|m| m.weight).collect();
        let decays: Vec<Decay> = molecules.into_iter().map(|m| m.decay).collect();
        let ens: EnsembleVisibility = ensemble_from_decays(&decays, &weights)?;
        let reference = cfg.detector.efficiency(e0, &cv);
        let relative_count_rate = if reference > 0.0 {
            ens.mean_weight / reference
        } else {
            0.0
        };
        Ok(PowerPoint {
            row: ResultRow {
                power_w,
                mean_entry_temperature_k: mean_entry,
                max_stage_temperature_k: max_peak,
                visibility: ens.result.visibility,
                visibility_stderr: ens.standard_error,
                baseline_visibility: ens.result.baseline_visibility,
                relative_count_rate,
                mean_visible_photons: ens.result.visible_photons,
            },
            coefficients: ens.coefficients,
        })
    }

    /// Power sweep over `cfg.powers_w`, rows sorted by power.
    pub fn sweep(&self, powers: &[f64]) -> Result<ResultTable> {
        let mut sorted = powers.to_vec();
        sorted.sort_by(f64::total_cmp);
        let rows = sorted
            .iter()
            .map(|&p| self.power_point(p).map(|pt| pt.row))
            .collect::<Result<_>>()?;
        Ok(ResultTable {
            scenario: self.cfg.scenario.clone(),
            rows,
        })
    }
}

fn in_scenario<T>(cfg: &ExperimentConfig, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Scenario { .. } | Error::Config(_) => e,
        other => Error::Scenario {
            scenario: cfg.scenario.clone(),
            source: Box::new(other),
        },
    })
}

/// Visibility, entry temperature, count rate and visible photons for every
/// power of the sweep.
pub fn run_scenario(cfg: &ExperimentConfig) -> Result<ResultTable> {
    in_scenario(cfg, Simulator::new(cfg).and_then(|s| s.sweep(&cfg.powers_w)))
}

/// R_λ (photons s⁻¹ nm⁻¹) on the configured wavelength grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumCurve {
    pub temperature_k: f64,
    pub lambda_nm: Vec<f64>,
    pub rate_per_nm: Vec<f64>,
}

pub fn export_spectrum(temperatures_k: &[f64], cfg: &ExperimentConfig) -> Result<Vec<SpectrumCurve>> {
    in_scenario(
        cfg,
        (|| {
            cfg.validate()?;
            let model = cfg.emission_model()?;
            let s = &cfg.spectrum;
            let n = ((s.lambda_max_nm - s.lambda_min_nm) / s.step_nm + 1e-9).floor() as usize;
            let lambda: Vec<f64> = (0..=n).map(|i| s.lambda_min_nm + i as f64 * s.step_nm).collect();
            temperatures_k
                .iter()
                .map(|&t| {
                    if !(t >= 0.0 && t.is_finite()) {
                        return Err(Error::invalid(format!("temperature must be >= 0, got {t}")));
                    }
                    Ok(SpectrumCurve {
                        temperature_k: t,
                        rate_per_nm: lambda.iter().map(|&l| model.spectral_rate_lambda(l, t)).collect(),
                        lambda_nm: lambda.clone(),
                    })
                })
                .collect()
        })(),
    )
}

/// One fringe scan: third-grating position against detected counts per
/// molecule relative to an unheated beam.
#[derive(Debug, Clone, PartialEq)]
pub struct FringeScan {
    pub power_w: f64,
    pub x_nm: Vec<f64>,
    pub counts: Vec<f64>,
    pub visibility: f64,
    pub relative_count_rate: f64,
}

/// Scans one grating period at `power_w` with the ensemble-averaged,
/// detection-weighted pattern.
pub fn export_fringe_scan(cfg: &ExperimentConfig, power_w: f64) -> Result<FringeScan> {
    in_scenario(
        cfg,
        (|| {
            let sim = Simulator::new(cfg)?;
            fringe_scan(&sim, power_w)
        })(),
    )
}

pub fn fringe_scan(sim: &Simulator, power_w: f64) -> Result<FringeScan> {
    let pt = sim.power_point(power_w)?;
    let c = &pt.coefficients;
    let points = sim.config().scan.points;
    let d = c.period_nm();
    let x_nm: Vec<f64> = (0..points).map(|i| d * i as f64 / points as f64).collect();
    let c0 = c.get(0).re;
    let counts = x_nm
        .iter()
        .map(|&x| c.density_at(x) / c0 * pt.row.relative_count_rate)
        .collect();
    Ok(FringeScan {
        power_w,
        x_nm,
        counts,
        visibility: pt.row.visibility,
        relative_count_rate: pt.row.relative_count_rate,
    })
}

/// Fits the triplet cross-section and ionization prefactor of the
/// configured stage to stage ion yields.
pub fn fit_scenario(cfg: &ExperimentConfig, observations: &[IonYieldObservation]) -> Result<HeatingFit> {
    in_scenario(
        cfg,
        (|| {
            cfg.validate()?;
            let model = cfg.emission_model()?;
            let base = cfg.stage.stage(0.0)?;
            let opts = FitOptions {
                seed: cfg.seed,
                relative_spread: cfg.velocity.relative_spread,
                initial_sigma_cm2: cfg.stage.triplet_sigma_cm2,
                initial_prefactor_per_s: cfg.stage.ionization.prefactor_per_s,
                ..FitOptions::default()
            };
            fit_heating_params(observations, &base, &model, &opts)
        })(),
    )
}
