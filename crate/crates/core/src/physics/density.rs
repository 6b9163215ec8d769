//! Normalised photon-wavelength distributions and sampling from them.

use std::sync::OnceLock;

use rand::Rng;

use crate::constants::photon_energy_ev;
use crate::error::{Error, Result};
use crate::numerics::quadrature::{integrate_piecewise, QuadOptions};
use crate::physics::emission::EmissionModel;

/// Intervals of the tabulated inverse-CDF sampler.
const SAMPLER_INTERVALS: usize = 8192;

/// Photon-wavelength distribution together with the total emission rate.
#[derive(Debug, Clone)]
pub struct SpectralDensity {
    temperature_k: f64,
    total_rate: f64,
    kind: Kind,
}

#[derive(Debug, Clone)]
enum Kind {
    Empty,
    Lines {
        wavelengths_nm: Vec<f64>,
        cumulative: Vec<f64>,
        probabilities: Vec<f64>,
    },
    Thermal {
        model: EmissionModel,
        /// Probability mass carried by each grid node.
        node_mass: Vec<f64>,
        sampler: OnceLock<PiecewiseLinear>,
    },
}

impl SpectralDensity {
    /// Nothing is emitted.
    pub fn empty(temperature_k: f64) -> Self {
        Self {
            temperature_k,
            total_rate: 0.0,
            kind: Kind::Empty,
        }
    }

    /// A single emission line.
    pub fn monochromatic(lambda_nm: f64, total_rate: f64) -> Result<Self> {
        Self::lines(&[lambda_nm], &[1.0], total_rate)
    }

    /// Discrete lines with relative weights (normalised internally).
    pub fn lines(wavelengths_nm: &[f64], weights: &[f64], total_rate: f64) -> Result<Self> {
        if wavelengths_nm.is_empty() || wavelengths_nm.len() != weights.len() {
            return Err(Error::invalid(
                "line density needs matching, non-empty wavelength and weight lists",
            ));
        }
        if wavelengths_nm.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
            return Err(Error::invalid("line wavelengths must be finite and > 0"));
        }
        if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(Error::invalid("line weights must be finite and >= 0"));
        }
        if !(total_rate >= 0.0 && total_rate.is_finite()) {
            return Err(Error::invalid("total rate must be finite and >= 0"));
        }
        let sum: f64 = weights.iter().sum();
        if !(sum > 0.0) {
            return Err(Error::DegenerateSpectrum {
                temperature_k: f64::NAN,
            });
        }
        let probabilities: Vec<f64> = weights.iter().map(|w| w / sum).collect();
        let mut acc = 0.0;
        let cumulative = probabilities
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Ok(Self {
            temperature_k: f64::NAN,
            total_rate,
            kind: Kind::Lines {
                wavelengths_nm: wavelengths_nm.to_vec(),
                cumulative,
                probabilities,
            },
        })
    }

    pub(crate) fn from_model(model: EmissionModel, temperature_k: f64, total_rate: f64, node_mass: Vec<f64>) -> Self {
        Self {
            temperature_k,
            total_rate,
            kind: Kind::Thermal {
                model,
                node_mass,
                sampler: OnceLock::new(),
            },
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self.kind, Kind::Empty)
    }

    /// Micro-canonical temperature the density was evaluated at; NaN for
    /// line densities.
    pub fn temperature_k(&self) -> f64 {
        self.temperature_k
    }

    /// R_tot, photons/s.
    pub fn total_rate(&self) -> f64 {
        self.total_rate
    }

    /// Probability density per nm. Zero for empty and line densities.
    pub fn pdf(&self, lambda_nm: f64) -> f64 {
        match &self.kind {
            Kind::Thermal { model, .. } => model.spectral_rate_lambda(lambda_nm, self.temperature_k) / self.total_rate,
            _ => 0.0,
        }
    }

    /// Cumulative probability of emitting at a wavelength ≤ `lambda_nm`.
    pub fn cdf(&self, lambda_nm: f64) -> Result<f64> {
        match &self.kind {
            Kind::Empty => Ok(0.0),
            Kind::Lines {
                wavelengths_nm,
                probabilities,
                ..
            } => Ok(wavelengths_nm
                .iter()
                .zip(probabilities)
                .filter(|(l, _)| **l <= lambda_nm)
                .map(|(_, p)| p)
                .sum()),
            Kind::Thermal { model, .. } => {
                let breaks: Vec<f64> = model.table().breakpoints_nm();
                let (lo, hi) = (breaks[0], breaks[breaks.len() - 1]);
                if lambda_nm <= lo {
                    return Ok(0.0);
                }
                let upto = lambda_nm.min(hi);
                let mut b: Vec<f64> = breaks.iter().copied().filter(|&x| x < upto).collect();
                b.push(upto);
                let t = self.temperature_k;
                let r = integrate_piecewise(
                    |l| model.spectral_rate_lambda(l, t),
                    &b,
                    QuadOptions {
                        rel_tol: 1e-10,
                        ..QuadOptions::default()
                    },
                )?;
                Ok((r.value / self.total_rate).min(1.0))
            }
        }
    }

    /// Expectation of `f(λ)` under the density.
    pub fn expect(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        match &self.kind {
            Kind::Empty => 0.0,
            Kind::Lines {
                wavelengths_nm,
                probabilities,
                ..
            } => wavelengths_nm.iter().zip(probabilities).map(|(l, p)| p * f(*l)).sum(),
            Kind::Thermal { model, node_mass, .. } => model
                .grid()
                .wavelengths_nm()
                .iter()
                .zip(node_mass)
                .map(|(l, p)| p * f(*l))
                .sum(),
        }
    }

    /// Mean photon energy in eV.
    pub fn mean_photon_energy_ev(&self) -> f64 {
        self.expect(photon_energy_ev)
    }

    /// Averaged sinc kernel η(Δr) = ⟨sin(2πΔr/λ)/(2πΔr/λ)⟩; 1 for an empty
    /// density (no photon, no which-path information).
    pub fn decoherence(&self, delta_r_nm: f64) -> f64 {
        if self.is_empty() || delta_r_nm == 0.0 {
            return 1.0;
        }
        let k = 2.0 * std::f64::consts::PI * delta_r_nm;
        self.expect(|l| sinc(k / l))
    }

    /// Draws one wavelength (nm).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        match &self.kind {
            Kind::Empty => Err(Error::DegenerateSpectrum {
                temperature_k: self.temperature_k,
            }),
            Kind::Lines {
                wavelengths_nm,
                cumulative,
                ..
            } => {
                let u: f64 = rng.random();
                let i = cumulative.partition_point(|&c| c <= u).min(wavelengths_nm.len() - 1);
                Ok(wavelengths_nm[i])
            }
            Kind::Thermal { model, sampler, .. } => {
                let s = sampler.get_or_init(|| PiecewiseLinear::tabulate(model, self.temperature_k));
                Ok(s.sample(rng.random()))
            }
        }
    }
}

/// sin(x)/x with the removable singularity filled in.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// Draws a wavelength from `density`; fails on an empty density.
pub fn sample_photon<R: Rng + ?Sized>(density: &SpectralDensity, rng: &mut R) -> Result<f64> {
    density.sample(rng)
}

/// Piecewise-linear density on a uniform wavelength grid, inverted
/// exactly per segment.
#[derive(Debug, Clone)]
struct PiecewiseLinear {
    x0: f64,
    h: f64,
    pdf: Vec<f64>,
    cdf: Vec<f64>,
}

impl PiecewiseLinear {
    fn tabulate(model: &EmissionModel, t_m: f64) -> Self {
        let (lo, hi) = model.table().support_nm();
        let n = SAMPLER_INTERVALS;
        let h = (hi - lo) / n as f64;
        let pdf: Vec<f64> = (0..=n)
            .map(|i| model.spectral_rate_lambda(lo + h * i as f64, t_m))
            .collect();
        let mut cdf = Vec::with_capacity(n + 1);
        cdf.push(0.0);
        for i in 0..n {
            let next = cdf[i] + 0.5 * h * (pdf[i] + pdf[i + 1]);
            cdf.push(next);
        }
        let total = cdf[n];
        for c in &mut cdf {
            *c /= total;
        }
        let pdf = pdf.into_iter().map(|p| p / total).collect();
        Self { x0: lo, h, pdf, cdf }
    }

    fn sample(&self, u: f64) -> f64 {
        let n = self.pdf.len() - 1;
        let i = self.cdf.partition_point(|&c| c <= u).clamp(1, n) - 1;
        let target = u - self.cdf[i];
        let (p0, p1) = (self.pdf[i], self.pdf[i + 1]);
        let slope = (p1 - p0) / self.h;
        // Solve p0 s + slope s^2 / 2 = target for s in [0, h].
        let s = if slope.abs() < 1e-300 || (slope * target).abs() < 1e-12 * p0 * p0 {
            if p0 > 0.0 {
                target / p0
            } else {
                0.0
            }
        } else {
            let disc = (p0 * p0 + 2.0 * slope * target).max(0.0);
            2.0 * target / (p0 + disc.sqrt())
        };
        self.x0 + self.h * i as f64 + s.clamp(0.0, self.h)
    }
}
