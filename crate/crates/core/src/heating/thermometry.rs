//! Ion-yield thermometry in the heating stage and the fit of the triplet
//! cross-section and Arrhenius prefactor to observed yields.

use std::io::BufRead;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::heating::config::{HeatingStageConfig, VelocityDistribution};
use crate::heating::stage::HeatingStage;
use crate::numerics::molecule_rng;
use crate::numerics::stats::RunningStats;
use crate::physics::{CoolingTable, EmissionModel};

/// Expected fraction of molecules ionized inside the stage at one power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IonYield {
    pub power_w: f64,
    pub yield_fraction: f64,
    pub standard_error: f64,
}

/// Stage exposures ∫exp(−E_a/kT) dt of `n` molecules; molecule `i` uses
/// stream `stream_offset + i` of `seed` for its velocity and its passage.
fn stage_exposures(
    stage: &HeatingStage,
    velocities: &VelocityDistribution,
    n: usize,
    seed: u64,
    stream_offset: u64,
) -> Result<Vec<f64>> {
    let e0 = stage.initial_energy_ev();
    let out: Vec<Result<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = molecule_rng(seed, stream_offset + i as u64);
            let v = velocities.sample(&mut rng);
            Ok(stage.traverse(v, e0, &mut rng)?.stage_exposure_s())
        })
        .collect();
    out.into_iter().collect()
}

/// Expected ionization probability 1 − exp(−A·J) averaged over exposures.
fn mean_yield(exposures: &[f64], prefactor: f64) -> RunningStats {
    exposures.iter().map(|j| -(-prefactor * j).exp_m1()).collect()
}

/// Monte-Carlo D1 ion yield for each power in `powers_w` (every beam at
/// that power). Each molecule contributes its conditional ionization
/// probability given its temperature history, which has the same mean as
/// counting ionized molecules and a smaller variance. Molecule `i` draws
/// from the same stream at every power.
pub fn d1_ion_yield(
    cfg: &HeatingStageConfig,
    model: &EmissionModel,
    velocities: &VelocityDistribution,
    powers_w: &[f64],
    n: usize,
    seed: u64,
) -> Result<Vec<IonYield>> {
    if n == 0 {
        return Err(Error::invalid("ion-yield estimate needs at least one molecule"));
    }
    velocities.validate()?;
    let table = Arc::new(CoolingTable::new(model));
    powers_w
        .iter()
        .map(|&p| {
            let stage = HeatingStage::with_table(cfg.with_power(p), table.clone())?;
            let j = stage_exposures(&stage, velocities, n, seed, 0)?;
            let s = mean_yield(&j, cfg.ionization.prefactor_per_s);
            Ok(IonYield {
                power_w: p,
                yield_fraction: s.mean(),
                standard_error: s.standard_error(),
            })
        })
        .collect()
}

/// One row of an ion-yield observation file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IonYieldObservation {
    pub power_w: f64,
    pub velocity_mps: f64,
    pub yield_fraction: f64,
    pub yield_err: f64,
}

/// Reads `power_W velocity_mps yield yield_err` rows (whitespace or comma
/// separated, `#` comments).
pub fn parse_observations<R: BufRead>(reader: R, origin: &str) -> Result<Vec<IonYieldObservation>> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(format!("reading {origin}"), e))?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse {
            path: origin.to_string(),
            line: idx + 1,
            message,
        };
        let cols: Vec<&str> = body
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        let vals = match cols
            .iter()
            .map(|c| c.parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
        {
            Ok(v) => v,
            // A header row may precede the data.
            Err(_) if out.is_empty() => continue,
            Err(_) => return Err(err(format!("non-numeric field in `{body}`"))),
        };
        if vals.len() != 4 {
            return Err(err(format!("expected 4 columns, found {}", vals.len())));
        }
        let obs = IonYieldObservation {
            power_w: vals[0],
            velocity_mps: vals[1],
            yield_fraction: vals[2],
            yield_err: vals[3],
        };
        if !(obs.power_w >= 0.0 && obs.velocity_mps > 0.0 && obs.yield_fraction >= 0.0 && obs.yield_err >= 0.0)
            || vals.iter().any(|v| !v.is_finite())
        {
            return Err(err(
                "power >= 0, velocity > 0, yield >= 0 and error >= 0 required".into()
            ));
        }
        out.push(obs);
    }
    Ok(out)
}

pub fn read_observations(path: &Path) -> Result<Vec<IonYieldObservation>> {
    let f = std::fs::File::open(path).map_err(|e| Error::io_path("open", path, e))?;
    parse_observations(std::io::BufReader::new(f), &path.display().to_string())
}

/// Search settings for [`fit_heating_params`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub molecules_per_point: usize,
    pub seed: u64,
    /// Relative velocity spread simulated around each observed velocity.
    pub relative_spread: f64,
    /// Centre of the first search grid.
    pub initial_sigma_cm2: f64,
    pub initial_prefactor_per_s: f64,
    /// Half-width of the first grid, decades.
    pub sigma_decades: f64,
    pub prefactor_decades: f64,
    /// Nodes per axis and grid (odd, so the centre is always on the grid).
    pub grid_points: usize,
    pub refinements: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            molecules_per_point: 200,
            seed: 1,
            relative_spread: 0.0,
            initial_sigma_cm2: 2e-17,
            initial_prefactor_per_s: 5e9,
            sigma_decades: 1.0,
            prefactor_decades: 2.0,
            grid_points: 9,
            refinements: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatingFit {
    pub sigma_cm2: f64,
    pub prefactor_per_s: f64,
    /// Sum of squared log-yield residuals at the optimum.
    pub residual: f64,
    pub objective_evaluations: usize,
}

/// Fits the triplet cross-section and Arrhenius prefactor to observed
/// stage ion yields by coarse-to-fine grid search in log space,
/// minimising Σ (ln y_model − ln y_obs)².
///
/// The simulated trajectories do not depend on the prefactor, so each
/// cross-section value costs one ensemble per observation and the prefactor
/// axis is searched on the cached exposures.
pub fn fit_heating_params(
    observations: &[IonYieldObservation],
    base: &HeatingStageConfig,
    model: &EmissionModel,
    opts: &FitOptions,
) -> Result<HeatingFit> {
    check_coverage(observations)?;
    if opts.grid_points < 3 || opts.grid_points.is_multiple_of(2) {
        return Err(Error::invalid("fit grid needs an odd number (>= 3) of points per axis"));
    }
    if opts.molecules_per_point == 0 {
        return Err(Error::invalid("fit needs at least one molecule per point"));
    }
    let table = Arc::new(CoolingTable::new(model));
    let n = opts.molecules_per_point;
    let exposures_for = |sigma: f64| -> Result<Vec<Vec<f64>>> {
        observations
            .iter()
            .enumerate()
            .map(|(k, o)| {
                let mut cfg = base.with_power(o.power_w);
                cfg.triplet_sigma_cm2 = sigma;
                let stage = HeatingStage::with_table(cfg, table.clone())?;
                let vel = VelocityDistribution::new(o.velocity_mps, opts.relative_spread)?;
                stage_exposures(&stage, &vel, n, opts.seed, (k * n) as u64)
            })
            .collect()
    };
    let objective = |exposures: &[Vec<f64>], a: f64| -> f64 {
        observations
            .iter()
            .zip(exposures)
            .map(|(o, j)| {
                let y = mean_yield(j, a).mean().max(1e-300);
                (y.ln() - o.yield_fraction.max(1e-300).ln()).powi(2)
            })
            .sum()
    };

    let g = opts.grid_points;
    let half = (g / 2) as f64;
    let mut ln_sigma = opts.initial_sigma_cm2.ln();
    let mut ln_a = opts.initial_prefactor_per_s.ln();
    let mut step_sigma = opts.sigma_decades * std::f64::consts::LN_10 / half;
    let mut step_a = opts.prefactor_decades * std::f64::consts::LN_10 / half;
    let mut best = f64::INFINITY;
    let mut evaluations = 0;
    for round in 0..=opts.refinements {
        let mut worst = f64::NEG_INFINITY;
        let mut round_best = (best, ln_sigma, ln_a);
        for i in 0..g {
            let ls = ln_sigma + (i as f64 - half) * step_sigma;
            let exps = exposures_for(ls.exp())?;
            for k in 0..g {
                let la = ln_a + (k as f64 - half) * step_a;
                let f = objective(&exps, la.exp());
                evaluations += 1;
                worst = worst.max(f);
                if f < round_best.0 {
                    round_best = (f, ls, la);
                }
            }
        }
        if round == 0 && (worst - round_best.0) <= 1e-12 * (1.0 + round_best.0) {
            return Err(Error::NonConvergence(
                "objective is flat over the search grid; the data do not constrain the parameters".into(),
            ));
        }
        best = round_best.0;
        ln_sigma = round_best.1;
        ln_a = round_best.2;
        step_sigma *= 2.0 / half.max(1.0);
        step_a *= 2.0 / half.max(1.0);
    }
    Ok(HeatingFit {
        sigma_cm2: ln_sigma.exp(),
        prefactor_per_s: ln_a.exp(),
        residual: best,
        objective_evaluations: evaluations,
    })
}

fn check_coverage(obs: &[IonYieldObservation]) -> Result<()> {
    let distinct = |f: fn(&IonYieldObservation) -> f64| {
        let mut v: Vec<f64> = obs.iter().map(f).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v.len()
    };
    if obs.len() < 4 || distinct(|o| o.power_w) < 2 || distinct(|o| o.velocity_mps) < 2 {
        return Err(Error::invalid(
            "fit needs at least 4 observations spanning at least 2 powers and 2 velocities",
        ));
    }
    if obs.iter().any(|o| !(o.yield_fraction > 0.0)) {
        return Err(Error::invalid("log-yield fit needs strictly positive observed yields"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::{CrossSectionTable, HeatCapacity};

    fn model() -> EmissionModel {
        EmissionModel::new(CrossSectionTable::default_surrogate(), HeatCapacity::default()).unwrap()
    }

    #[test]
    fn no_light_no_ions() {
        let cfg = HeatingStageConfig::uniform(16, 0.0);
        let y = d1_ion_yield(&cfg, &model(), &VelocityDistribution::fixed(190.0), &[0.0], 50, 1).unwrap();
        assert!(y[0].yield_fraction < 1e-30);
    }

    #[test]
    fn parses_observation_rows() {
        let text =
            "# power velocity yield err\npower_W,velocity_mps,yield,yield_err\n3 190 1e-4 1e-5\n6,190,2e-3,1e-4\n";
        let obs = parse_observations(text.as_bytes(), "inline").unwrap();
        assert_eq!(obs.len(), 2);
        assert_eq!(obs[1].yield_fraction, 2e-3);
        assert!(parse_observations("1 2 3\n".as_bytes(), "x").is_err());
        assert!(parse_observations("1 2 3 4\n1 -2 3 4\n".as_bytes(), "x").is_err());
    }

    #[test]
    fn single_point_is_rejected() {
        let o = IonYieldObservation {
            power_w: 5.0,
            velocity_mps: 190.0,
            yield_fraction: 1e-3,
            yield_err: 1e-4,
        };
        let err = fit_heating_params(&[o], &HeatingStageConfig::default(), &model(), &FitOptions::default());
        assert!(matches!(err, Err(Error::InvalidInput(_))));
    }
}
