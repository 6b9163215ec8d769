use std::ops::ControlFlow;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::BOLTZMANN_EV;
use crate::error::{Error, Result};
use crate::heating::TemperatureTrajectory;
use crate::interferometer::coefficients::{base_coefficients, FringeCoefficients, DEFAULT_L_MAX};
use crate::interferometer::decoherence::one_minus_sinc;
use crate::interferometer::geometry::{de_broglie_and_talbot, InterferometerGeometry};
use crate::numerics::ode::{integrate as integrate_ode, OdeOptions};
use crate::numerics::quadrature::composite_gauss_legendre;
use crate::physics::{EmissionModel, HeatCapacity};

/// Fringe contrast without emission.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Baseline {
    /// Idealized binary gratings, coefficients from Talbot-Lau theory.
    Ideal,
    /// Sinusoidal pattern with a measured contrast.
    Anchored { visibility: f64 },
}

impl Default for Baseline {
    fn default() -> Self {
        Baseline::Anchored { visibility: 0.47 }
    }
}

/// Detection efficiency of the ionizing detector as a function of the
/// internal energy a molecule arrives with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DetectorModel {
    /// Every arriving molecule counts.
    Ideal,
    /// Thermal ionization after the detector deposits `deposit_ev`:
    /// 1 − exp(−A·exp(−E_a/k_BT)·dwell).
    Thermal {
        deposit_ev: f64,
        dwell_s: f64,
        prefactor_per_s: f64,
        activation_energy_ev: f64,
    },
}

impl Default for DetectorModel {
    fn default() -> Self {
        DetectorModel::Thermal {
            deposit_ev: 115.0,
            dwell_s: 5e-6,
            prefactor_per_s: 5e9,
            activation_energy_ev: 7.6,
        }
    }
}

impl DetectorModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            DetectorModel::Ideal => Ok(()),
            DetectorModel::Thermal {
                deposit_ev,
                dwell_s,
                prefactor_per_s,
                activation_energy_ev,
            } => {
                let ok = [deposit_ev, dwell_s, prefactor_per_s, activation_energy_ev]
                    .iter()
                    .all(|x| *x >= 0.0 && x.is_finite());
                if ok && dwell_s > 0.0 && prefactor_per_s > 0.0 {
                    Ok(())
                } else {
                    Err(Error::invalid(
                        "detector parameters must be finite, dwell and prefactor > 0",
                    ))
                }
            }
        }
    }

    pub fn efficiency(&self, arrival_energy_ev: f64, cv: &HeatCapacity) -> f64 {
        match *self {
            DetectorModel::Ideal => 1.0,
            DetectorModel::Thermal {
                deposit_ev,
                dwell_s,
                prefactor_per_s,
                activation_energy_ev,
            } => {
                let t = cv.temperature_k(arrival_energy_ev.max(0.0) + deposit_ev);
                if !(t > 0.0) {
                    return 0.0;
                }
                let rate = prefactor_per_s * (-activation_energy_ev / (BOLTZMANN_EV * t)).exp();
                -(-rate * dwell_s).exp_m1()
            }
        }
    }
}

/// Visibility after emission, the emission-free baseline, and the mean
/// number of photons emitted in the visible band between the first and
/// third gratings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisibilityResult {
    pub visibility: f64,
    pub baseline_visibility: f64,
    pub visible_photons: f64,
}

/// Which harmonics [`Interferometer::decay`] evolves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Harmonics {
    /// ℓ = 1 only; enough for the visibility.
    First,
    /// ℓ ≤ n; higher orders are dropped from the decayed pattern.
    UpTo(usize),
    /// Every non-zero harmonic of the baseline pattern.
    All,
}

/// Emission-induced decay of one trajectory's fringe pattern.
#[derive(Debug, Clone)]
pub struct Decay {
    pub base: FringeCoefficients,
    /// exp(−exponents[ℓ−1]) multiplies C_±ℓ. Orders beyond the evolved
    /// ones are dropped from [`Decay::coefficients`].
    pub exponents: Vec<f64>,
    pub visible_photons: f64,
}

impl Decay {
    pub fn coefficients(&self) -> FringeCoefficients {
        self.base
            .scaled_by(|l| self.exponents.get(l - 1).map_or(0.0, |x| (-x).exp()))
    }

    pub fn result(&self) -> VisibilityResult {
        VisibilityResult {
            visibility: self.coefficients().visibility(),
            baseline_visibility: self.base.visibility(),
            visible_photons: self.visible_photons,
        }
    }
}

/// Geometry, emission model and baseline contrast of one setup.
#[derive(Debug, Clone)]
pub struct Interferometer {
    geometry: InterferometerGeometry,
    model: EmissionModel,
    baseline: Baseline,
    pattern_harmonics: usize,
}

impl Interferometer {
    pub fn new(geometry: InterferometerGeometry, model: EmissionModel, baseline: Baseline) -> Result<Self> {
        geometry.validate()?;
        if let Baseline::Anchored { visibility } = baseline {
            if !(0.0..=1.0).contains(&visibility) {
                return Err(Error::invalid(format!(
                    "baseline visibility must lie in [0, 1], got {visibility}"
                )));
            }
        }
        Ok(Self {
            geometry,
            model,
            baseline,
            pattern_harmonics: DEFAULT_L_MAX,
        })
    }

    /// Harmonic orders kept in ensemble-averaged patterns (default 8).
    pub fn with_pattern_harmonics(mut self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("need at least one pattern harmonic"));
        }
        self.pattern_harmonics = n;
        Ok(self)
    }

    pub fn pattern_harmonics(&self) -> usize {
        self.pattern_harmonics
    }

    pub fn geometry(&self) -> &InterferometerGeometry {
        &self.geometry
    }

    pub fn model(&self) -> &EmissionModel {
        &self.model
    }

    pub fn baseline(&self) -> Baseline {
        self.baseline
    }

    /// Emission-free coefficients at speed `v`.
    pub fn base_coefficients(&self, v: f64) -> Result<FringeCoefficients> {
        let (lambda_db, _) = de_broglie_and_talbot(&self.geometry, v)?;
        match self.baseline {
            Baseline::Ideal => base_coefficients(&self.geometry, lambda_db),
            Baseline::Anchored { visibility } => FringeCoefficients::anchored(self.geometry.period_nm, visibility),
        }
    }

    fn check_span(&self, traj: &TemperatureTrajectory) -> Result<f64> {
        let v = traj.velocity_mps();
        let t_end = self.geometry.transit_time_s(v);
        // Allow a few ulps of slack at the exit grating.
        if !traj.spans(0.0, t_end * (1.0 - 1e-12)) {
            return Err(Error::invalid(format!(
                "trajectory covers [{:e}, {:e}] s but the interferometer needs [0, {t_end:e}] s",
                traj.start_time(),
                traj.end_time()
            )));
        }
        Ok(t_end)
    }

    /// Harmonics with a non-zero baseline coefficient, ℓ ≥ 1.
    fn active(base: &FringeCoefficients, which: Harmonics) -> Vec<usize> {
        let top = match which {
            Harmonics::First => 1.min(base.l_max()),
            Harmonics::UpTo(n) => n.min(base.l_max()),
            Harmonics::All => base.l_max(),
        };
        (1..=top).filter(|&l| base.get(l as i64).norm() > 0.0).collect()
    }

    /// Decay exponents ∫dt Σ_λ R(λ,T(t))·(1 − sinc(2πΔr_ℓ(t)/λ)) and the
    /// visible photon count, by adaptive quadrature split at the middle
    /// grating and at every trajectory sample.
    pub fn decay(&self, traj: &TemperatureTrajectory, which: Harmonics) -> Result<Decay> {
        let t_end = self.check_span(traj)?;
        let v = traj.velocity_mps();
        let base = self.base_coefficients(v)?;
        let harmonics = Self::active(&base, which);
        let grid = self.model.grid();
        let cv = *self.model.heat_capacity();
        let (lo, hi) = self.model.band_nm();
        let two_pi_over_lambda: Vec<f64> = grid
            .wavelengths_nm()
            .iter()
            .map(|l| 2.0 * std::f64::consts::PI / l)
            .collect();
        let in_band: Vec<bool> = grid.wavelengths_nm().iter().map(|&l| l >= lo && l <= hi).collect();
        let geometry = self.geometry;
        let mut rates = Vec::with_capacity(grid.len());
        let mut separations = vec![0.0; harmonics.len()];
        let mut integrand = |t: f64, out: &mut [f64]| {
            out.fill(0.0);
            let temp = traj.temperature_at(t, &cv);
            grid.node_rates(temp, &cv, &mut rates);
            for (dr, &l) in separations.iter_mut().zip(&harmonics) {
                *dr = geometry.path_separation_nm(l as f64, t, v);
            }
            for (i, r) in rates.iter().enumerate() {
                if *r == 0.0 {
                    continue;
                }
                if in_band[i] {
                    out[0] += r;
                }
                for (k, dr) in separations.iter().enumerate() {
                    out[k + 1] += r * one_minus_sinc(two_pi_over_lambda[i] * dr);
                }
            }
        };
        // The integrand is smooth between trajectory samples, so a fixed
        // rule per panel is enough.
        let dim = harmonics.len() + 1;
        let mut total = vec![0.0; dim];
        let mut out = vec![0.0; dim];
        for (t, w) in composite_gauss_legendre(&panel_breaks(traj, t_end), PANEL_ORDER) {
            integrand(t, &mut out);
            for (acc, x) in total.iter_mut().zip(&out) {
                *acc += w * x;
            }
        }
        let evolved = harmonics.last().copied().unwrap_or(0);
        let mut exponents = vec![0.0; evolved];
        for (k, &l) in harmonics.iter().enumerate() {
            exponents[l - 1] = total[k + 1];
        }
        Ok(Decay {
            base,
            exponents,
            visible_photons: total[0],
        })
    }

    /// Integrates dC_ℓ/dt = R_tot·(η_ℓ − 1)·C_ℓ for every non-zero
    /// harmonic, restarting at the middle grating and at every trajectory
    /// sample. Returns the final coefficients and the visible photon count.
    pub fn evolve_ode(&self, traj: &TemperatureTrajectory) -> Result<(FringeCoefficients, f64)> {
        let t_end = self.check_span(traj)?;
        let v = traj.velocity_mps();
        let base = self.base_coefficients(v)?;
        let harmonics = Self::active(&base, Harmonics::All);
        let grid = self.model.grid();
        let cv = *self.model.heat_capacity();
        let (lo, hi) = self.model.band_nm();
        let lambdas = grid.wavelengths_nm().to_vec();
        let geometry = self.geometry;
        let n_h = harmonics.len();
        // [Re C_ℓ, Im C_ℓ] per harmonic, then the visible count.
        let mut y = vec![0.0; 2 * n_h + 1];
        for (k, &l) in harmonics.iter().enumerate() {
            let c = base.get(l as i64);
            y[2 * k] = c.re;
            y[2 * k + 1] = c.im;
        }
        let mut rates = Vec::with_capacity(grid.len());
        let mut rhs = |t: f64, y: &[f64], d: &mut [f64]| {
            let temp = traj.temperature_at(t, &cv);
            grid.node_rates(temp, &cv, &mut rates);
            let mut visible = 0.0;
            for (i, r) in rates.iter().enumerate() {
                if lambdas[i] >= lo && lambdas[i] <= hi {
                    visible += r;
                }
            }
            d[2 * n_h] = visible;
            for (k, &l) in harmonics.iter().enumerate() {
                let kdr = 2.0 * std::f64::consts::PI * geometry.path_separation_nm(l as f64, t, v);
                let loss: f64 = rates
                    .iter()
                    .zip(&lambdas)
                    .map(|(r, lam)| if *r == 0.0 { 0.0 } else { r * one_minus_sinc(kdr / lam) })
                    .sum();
                d[2 * k] = -loss * y[2 * k];
                d[2 * k + 1] = -loss * y[2 * k + 1];
            }
        };
        let breaks = panel_breaks(traj, t_end);
        let opts = OdeOptions {
            rtol: 1e-10,
            atol: 1e-30,
            ..OdeOptions::default()
        };
        for w in breaks.windows(2) {
            integrate_ode(&mut rhs, w[0], w[1], &mut y, &opts, |_, _| ControlFlow::Continue(()))?;
        }
        let mut c: Vec<Complex64> = (0..=base.l_max() as i64).map(|l| base.get(l)).collect();
        for (k, &l) in harmonics.iter().enumerate() {
            c[l] = Complex64::new(y[2 * k], y[2 * k + 1]);
        }
        Ok((FringeCoefficients::from_non_negative(base.period_nm(), &c)?, y[2 * n_h]))
    }
}

/// Gauss-Legendre nodes per trajectory panel in [`Interferometer::decay`].
const PANEL_ORDER: usize = 6;
/// Panels over the full transit at the least.
const MIN_PANELS: usize = 32;

/// Trajectory samples inside the transit plus its ends and the middle
/// grating, where the path separation has a kink. Long panels are split.
fn panel_breaks(traj: &TemperatureTrajectory, t_end: f64) -> Vec<f64> {
    let mut b = traj.breaks_within(0.0, t_end);
    b.push(0.5 * t_end);
    b.sort_by(f64::total_cmp);
    b.dedup();
    let max_len = t_end / MIN_PANELS as f64;
    let mut out = vec![b[0]];
    for w in b.windows(2) {
        let n = ((w[1] - w[0]) / max_len - 1e-6).ceil().max(1.0) as usize;
        out.extend((1..n).map(|k| w[0] + (w[1] - w[0]) * k as f64 / n as f64));
        out.push(w[1]);
    }
    out
}

/// Visibility of one trajectory from the exponential closed form.
pub fn closed_form_visibility(traj: &TemperatureTrajectory, ifm: &Interferometer) -> Result<VisibilityResult> {
    Ok(ifm.decay(traj, Harmonics::First)?.result())
}

/// Visibility of one trajectory from the coefficient rate equations.
pub fn evolve_visibility_ode(traj: &TemperatureTrajectory, ifm: &Interferometer) -> Result<VisibilityResult> {
    let (c, visible_photons) = ifm.evolve_ode(traj)?;
    Ok(VisibilityResult {
        visibility: c.visibility(),
        baseline_visibility: ifm.base_coefficients(traj.velocity_mps())?.visibility(),
        visible_photons,
    })
}

/// Detection-weighted ensemble average.
#[derive(Debug, Clone)]
pub struct EnsembleVisibility {
    pub result: VisibilityResult,
    pub standard_error: f64,
    /// Weighted mean of the decayed coefficients.
    pub coefficients: FringeCoefficients,
    /// Mean detection weight per molecule (survival × detector efficiency).
    pub mean_weight: f64,
    pub molecules: usize,
}

/// Averages per-trajectory coefficients with weight survival probability ×
/// detector efficiency at arrival, then V = 2|C̄₁/C̄₀|. Orders above
/// [`Interferometer::pattern_harmonics`] are dropped. Trajectories are
/// evaluated in parallel and summed in index order.
pub fn ensemble_visibility(
    trajectories: &[TemperatureTrajectory],
    ifm: &Interferometer,
    detector: &DetectorModel,
) -> Result<EnsembleVisibility> {
    if trajectories.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    detector.validate()?;
    let cv = *ifm.model().heat_capacity();
    let decays: Vec<Decay> = trajectories
        .par_iter()
        .map(|tr| ifm.decay(tr, Harmonics::UpTo(ifm.pattern_harmonics)))
        .collect::<Result<_>>()?;
    let weights: Vec<f64> = trajectories
        .iter()
        .map(|tr| tr.survival_probability() * detector.efficiency(tr.final_energy_ev(), &cv))
        .collect();
    ensemble_from_decays(&decays, &weights)
}

/// Weighted reduction behind [`ensemble_visibility`].
pub fn ensemble_from_decays(decays: &[Decay], weights: &[f64]) -> Result<EnsembleVisibility> {
    if decays.is_empty() || decays.len() != weights.len() {
        return Err(Error::EmptyEnsemble);
    }
    if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
        return Err(Error::invalid("detection weights must be finite and >= 0"));
    }
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(Error::EmptyEnsemble);
    }
    let l_max = decays.iter().map(|d| d.exponents.len()).max().unwrap_or(0);
    let period = decays[0].base.period_nm();
    let mut mean = vec![Complex64::new(0.0, 0.0); l_max + 1];
    let mut mean_base = vec![Complex64::new(0.0, 0.0); l_max + 1];
    let mut visible = 0.0;
    let per_molecule: Vec<FringeCoefficients> = decays.iter().map(Decay::coefficients).collect();
    for ((d, c), w) in decays.iter().zip(&per_molecule).zip(weights) {
        for l in 0..=l_max {
            mean[l] += w * c.get(l as i64);
            mean_base[l] += w * d.base.get(l as i64);
        }
        visible += w * d.visible_photons;
    }
    for l in 0..=l_max {
        mean[l] /= total;
        mean_base[l] /= total;
    }
    let coefficients = FringeCoefficients::from_non_negative(period, &mean)?;
    let base = FringeCoefficients::from_non_negative(period, &mean_base)?;
    let visibility = coefficients.visibility();
    // Linearized ratio estimator for 2|ΣwC₁|/ΣwC₀.
    let n = decays.len();
    let standard_error = if n > 1 {
        let c1 = mean[1];
        let dir = if c1.norm() > 0.0 {
            c1 / c1.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let c0 = mean[0].re;
        let ss: f64 = per_molecule
            .iter()
            .zip(weights)
            .map(|(c, w)| {
                let z = 2.0 * (c.get(1) * dir.conj()).re - visibility * c.get(0).re;
                (w * z).powi(2)
            })
            .sum();
        (ss * n as f64 / (n as f64 - 1.0)).sqrt() / (total * c0)
    } else {
        0.0
    };
    Ok(EnsembleVisibility {
        result: VisibilityResult {
            visibility,
            baseline_visibility: base.visibility(),
            visible_photons: visible / total,
        },
        standard_error,
        coefficients,
        mean_weight: total / n as f64,
        molecules: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::CrossSectionTable;

    fn setup(baseline: Baseline) -> Interferometer {
        let m = EmissionModel::new(CrossSectionTable::default_surrogate(), HeatCapacity::default()).unwrap();
        Interferometer::new(InterferometerGeometry::default(), m, baseline).unwrap()
    }

    fn constant(ifm: &Interferometer, v: f64, t_k: f64) -> TemperatureTrajectory {
        let e = ifm.model().heat_capacity().energy_ev(t_k);
        TemperatureTrajectory::constant(v, e, 0.0, ifm.geometry().transit_time_s(v)).unwrap()
    }

    #[test]
    fn cold_molecule_keeps_contrast() {
        let ifm = setup(Baseline::default());
        let r = closed_form_visibility(&constant(&ifm, 190.0, 900.0), &ifm).unwrap();
        assert!((r.visibility - r.baseline_visibility).abs() < 1e-6 * r.baseline_visibility);
        assert_eq!(r.baseline_visibility, 0.47);
    }

    #[test]
    fn dark_spectrum_is_exact() {
        let table = CrossSectionTable::new(vec![300.0, 700.0], vec![0.0, 0.0], 1.5).unwrap();
        let m = EmissionModel::new(table, HeatCapacity::default()).unwrap();
        let ifm = Interferometer::new(InterferometerGeometry::default(), m, Baseline::default()).unwrap();
        let r = closed_form_visibility(&constant(&ifm, 190.0, 4000.0), &ifm).unwrap();
        assert_eq!(r.visibility, r.baseline_visibility);
        assert_eq!(r.visible_photons, 0.0);
    }

    #[test]
    fn ode_matches_closed_form_at_constant_temperature() {
        let ifm = setup(Baseline::default());
        for (v, t) in [(190.0, 2500.0), (100.0, 2800.0), (250.0, 3200.0)] {
            let tr = constant(&ifm, v, t);
            let a = closed_form_visibility(&tr, &ifm).unwrap();
            let b = evolve_visibility_ode(&tr, &ifm).unwrap();
            assert!((a.visibility - b.visibility).abs() < 1e-6 * a.visibility, "{a:?} {b:?}");
            assert!((a.visible_photons - b.visible_photons).abs() < 1e-6 * a.visible_photons);
        }
    }

    #[test]
    fn ideal_baseline_ode_keeps_zeroth_order() {
        let ifm = setup(Baseline::Ideal);
        let tr = constant(&ifm, 190.0, 2700.0);
        let (c, _) = ifm.evolve_ode(&tr).unwrap();
        let base = ifm.base_coefficients(190.0).unwrap();
        assert_eq!(c.get(0), base.get(0));
        let d = ifm.decay(&tr, Harmonics::UpTo(4)).unwrap().coefficients();
        for l in 1..=4 {
            assert!((c.get(l) - d.get(l)).norm() < 1e-6 * base.get(l).norm().max(1e-3 * base.get(0).re));
        }
    }

    #[test]
    fn piecewise_temperature_composes() {
        let ifm = setup(Baseline::default());
        let v = 190.0;
        let tt = ifm.geometry().transit_time_s(v);
        let cv = *ifm.model().heat_capacity();
        let edges = [0.0, 0.3 * tt, 0.7 * tt, tt];
        let levels = [cv.energy_ev(3000.0), cv.energy_ev(2600.0), cv.energy_ev(2300.0)];
        let tr = TemperatureTrajectory::piecewise_constant(v, &edges, &levels).unwrap();
        let ode = evolve_visibility_ode(&tr, &ifm).unwrap();
        // Product of per-segment exponentials, each from a constant trajectory.
        let mut exponent = 0.0;
        for k in 0..3 {
            let t_k = cv.temperature_k(levels[k]);
            let seg = segment_exponent(&ifm, v, t_k, edges[k], edges[k + 1]);
            exponent += seg;
        }
        let expect = 0.47 * (-exponent).exp();
        assert!(
            (ode.visibility - expect).abs() < 1e-6 * expect,
            "{} vs {expect}",
            ode.visibility
        );
    }

    /// ℓ = 1 exponent of a constant temperature over [a, b].
    fn segment_exponent(ifm: &Interferometer, v: f64, t_k: f64, a: f64, b: f64) -> f64 {
        let grid = ifm.model().grid();
        let cv = *ifm.model().heat_capacity();
        let mut rates = Vec::new();
        grid.node_rates(t_k, &cv, &mut rates);
        let g = *ifm.geometry();
        let mid = g.separation_m / v;
        let f = |t: f64| {
            let dr = g.path_separation_nm(1.0, t, v);
            rates
                .iter()
                .zip(grid.wavelengths_nm())
                .map(|(r, l)| r * one_minus_sinc(2.0 * std::f64::consts::PI * dr / l))
                .sum::<f64>()
        };
        let mut breaks = vec![a, b];
        if a < mid && mid < b {
            breaks.insert(1, mid);
        }
        crate::numerics::integrate_piecewise(f, &breaks, crate::numerics::QuadOptions::default())
            .unwrap()
            .value
    }

    #[test]
    fn emission_never_raises_contrast() {
        let ifm = setup(Baseline::default());
        let mut last = 1.0;
        for t in [1500.0, 2000.0, 2500.0, 3000.0, 3500.0] {
            let r = closed_form_visibility(&constant(&ifm, 190.0, t), &ifm).unwrap();
            assert!(r.visibility <= r.baseline_visibility && r.visibility < last);
            last = r.visibility;
        }
    }

    #[test]
    fn rejects_short_trajectory() {
        let ifm = setup(Baseline::default());
        let tr = TemperatureTrajectory::constant(190.0, 30.0, 0.0, 1e-3).unwrap();
        assert!(closed_form_visibility(&tr, &ifm).is_err());
        assert!(matches!(
            ensemble_visibility(&[], &ifm, &DetectorModel::Ideal),
            Err(Error::EmptyEnsemble)
        ));
    }

    #[test]
    fn ensemble_identities() {
        let ifm = setup(Baseline::default());
        let a = constant(&ifm, 190.0, 2600.0);
        let b = constant(&ifm, 170.0, 3000.0);
        let single = ensemble_visibility(std::slice::from_ref(&a), &ifm, &DetectorModel::Ideal).unwrap();
        let cf = closed_form_visibility(&a, &ifm).unwrap();
        assert!((single.result.visibility - cf.visibility).abs() < 1e-12);
        let dup = ensemble_visibility(&[a.clone(), a.clone(), a.clone()], &ifm, &DetectorModel::Ideal).unwrap();
        assert!((dup.result.visibility - cf.visibility).abs() < 1e-12);
        let pair = ensemble_visibility(&[a.clone(), b.clone()], &ifm, &DetectorModel::Ideal).unwrap();
        let vb = closed_form_visibility(&b, &ifm).unwrap().visibility;
        let by_hand = 0.5 * (cf.visibility + vb);
        assert!((pair.result.visibility - by_hand).abs() < 1e-12);
    }

    #[test]
    fn hotter_molecules_are_detected_better() {
        let d = DetectorModel::default();
        let cv = HeatCapacity::default();
        let cold = d.efficiency(cv.energy_ev(900.0), &cv);
        let warm = d.efficiency(cv.energy_ev(2500.0), &cv);
        assert!(cold > 0.0 && warm > cold && warm <= 1.0);
        assert_eq!(DetectorModel::Ideal.efficiency(0.0, &cv), 1.0);
    }
}
