use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::interferometer::geometry::InterferometerGeometry;
use crate::physics::sinc;

/// Smallest harmonic order kept by [`base_coefficients`].
pub const DEFAULT_L_MAX: usize = 8;
/// Hard ceiling on the harmonic order.
pub const MAX_L_MAX: usize = 256;
/// Truncation criteria: |C_ℓmax| / |C₁| and dropped |C_ℓ| / C₀.
const TRUNCATION_VS_FIRST: f64 = 1e-4;
const TRUNCATION_VS_MEAN: f64 = 1e-6;

/// Fourier coefficients C_ℓ, ℓ ∈ [−ℓmax, ℓmax], of the periodic molecular
/// density w(x) = Σ C_ℓ e^{2πiℓx/d} behind the third grating.
#[derive(Debug, Clone, PartialEq)]
pub struct FringeCoefficients {
    period_nm: f64,
    values: Vec<Complex64>,
}

impl FringeCoefficients {
    /// From the non-negative orders `c[0..=ℓmax]`; negative orders follow by
    /// conjugate symmetry. `C₀` must be real and positive.
    pub fn from_non_negative(period_nm: f64, c: &[Complex64]) -> Result<Self> {
        if !(period_nm > 0.0 && period_nm.is_finite()) {
            return Err(Error::invalid("pattern period must be > 0"));
        }
        let Some(c0) = c.first() else {
            return Err(Error::invalid("need at least the zeroth coefficient"));
        };
        if !(c0.re > 0.0) || c0.im.abs() > 1e-12 * c0.re {
            return Err(Error::invalid(format!("C0 must be real and > 0, got {c0}")));
        }
        if c.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::invalid("coefficients must be finite"));
        }
        let l_max = c.len() - 1;
        let mut values = Vec::with_capacity(2 * l_max + 1);
        values.extend(c[1..].iter().rev().map(|z| z.conj()));
        values.push(Complex64::new(c0.re, 0.0));
        values.extend_from_slice(&c[1..]);
        Ok(Self { period_nm, values })
    }

    /// Pure sinusoid C₀ = 1, C±1 = V₀/2.
    pub fn anchored(period_nm: f64, v0: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&v0) {
            return Err(Error::invalid(format!(
                "baseline visibility must lie in [0, 1], got {v0}"
            )));
        }
        Self::from_non_negative(period_nm, &[Complex64::new(1.0, 0.0), Complex64::new(0.5 * v0, 0.0)])
    }

    pub fn period_nm(&self) -> f64 {
        self.period_nm
    }

    pub fn l_max(&self) -> usize {
        self.values.len() / 2
    }

    /// C_ℓ; zero beyond the truncation.
    pub fn get(&self, l: i64) -> Complex64 {
        let l_max = self.l_max() as i64;
        if l.abs() > l_max {
            Complex64::new(0.0, 0.0)
        } else {
            self.values[(l + l_max) as usize]
        }
    }

    /// C_ℓ for ℓ = 0..=ℓmax.
    pub fn non_negative(&self) -> &[Complex64] {
        &self.values[self.l_max()..]
    }

    /// 2|C₁/C₀|.
    pub fn visibility(&self) -> f64 {
        2.0 * self.get(1).norm() / self.get(0).re
    }

    /// Multiplies every C_ℓ (and its mirror) by `factor(ℓ)`, ℓ ≥ 1.
    pub fn scaled_by(&self, mut factor: impl FnMut(usize) -> f64) -> Self {
        let l_max = self.l_max();
        let mut out = self.clone();
        for l in 1..=l_max {
            let f = factor(l);
            out.values[l_max + l] *= f;
            out.values[l_max - l] *= f;
        }
        out
    }

    /// Coefficients seen with the third grating shifted by `x0_nm`.
    pub fn shifted(&self, x0_nm: f64) -> Self {
        let l_max = self.l_max() as i64;
        let mut out = self.clone();
        for l in -l_max..=l_max {
            let phase = Complex64::from_polar(1.0, 2.0 * PI * l as f64 * x0_nm / self.period_nm);
            out.values[(l + l_max) as usize] *= phase;
        }
        out
    }

    /// w(x) at one position, nm.
    pub fn density_at(&self, x_nm: f64) -> f64 {
        let k = 2.0 * PI * x_nm / self.period_nm;
        let mut w = self.get(0).re;
        for (l, c) in self.non_negative().iter().enumerate().skip(1) {
            let e = Complex64::from_polar(1.0, k * l as f64);
            w += 2.0 * (c * e).re;
        }
        w
    }
}

/// w(x) = Σ C_ℓ e^{2πiℓx/d} on the given positions (nm).
pub fn fringe_pattern(c: &FringeCoefficients, x_nm: &[f64]) -> Vec<f64> {
    x_nm.iter().map(|&x| c.density_at(x)).collect()
}

/// (max − min)/(max + min) of a sampled pattern.
pub fn pattern_visibility(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if max + min > 0.0 {
        (max - min) / (max + min)
    } else {
        0.0
    }
}

/// Fourier coefficient of a binary grating with open fraction `f`.
pub fn grating_amplitude(n: i64, f: f64) -> f64 {
    f * sinc(PI * n as f64 * f)
}

/// (1/d)∫₀ᵈ t(x)·t(x+s)·e^{−2πimx/d} dx for the binary transmission t of
/// slit width `w` and period `d`, evaluated exactly from the slit overlap.
pub fn overlap_coefficient(m: i64, s_nm: f64, w: f64, d: f64) -> Complex64 {
    let s = s_nm.rem_euclid(d);
    let (lo, hi) = (-0.5 * w, 0.5 * w);
    let theta = 2.0 * PI * m as f64 / d;
    let mut total = Complex64::new(0.0, 0.0);
    for k in -1..=2 {
        let a = (lo - s + k as f64 * d).max(lo);
        let b = (hi - s + k as f64 * d).min(hi);
        if b <= a {
            continue;
        }
        total += if m == 0 {
            Complex64::new((b - a) / d, 0.0)
        } else {
            let ea = Complex64::from_polar(1.0, -theta * a);
            let eb = Complex64::from_polar(1.0, -theta * b);
            (eb - ea) / Complex64::new(0.0, -theta * d)
        };
    }
    total
}

/// Talbot-Lau coefficient C_ℓ for Talbot parameter ξ = L/L_T:
/// a_ℓ²·e^{−2πiξℓ²}·G_2ℓ(ξℓd).
pub fn talbot_lau_coefficient(l: i64, xi: f64, geometry: &InterferometerGeometry) -> Complex64 {
    let d = geometry.period_nm;
    let f = geometry.open_fraction();
    let a = grating_amplitude(l, f);
    if a == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let lf = l as f64;
    // Reduce ξℓ² modulo 1 before forming the phase.
    let phase = -2.0 * PI * (xi * lf * lf).rem_euclid(1.0);
    let g = overlap_coefficient(2 * l, xi * lf * d, geometry.slit_width_nm, d);
    a * a * Complex64::from_polar(1.0, phase) * g
}

/// Density-pattern coefficients of three identical binary gratings at de
/// Broglie wavelength `lambda_db_pm`. The harmonic order grows from
/// [`DEFAULT_L_MAX`] until |C_ℓmax| < 1e-4·|C₁| and every dropped term is
/// below 1e-6·C₀, capped at [`MAX_L_MAX`].
pub fn base_coefficients(geometry: &InterferometerGeometry, lambda_db_pm: f64) -> Result<FringeCoefficients> {
    geometry.validate()?;
    if !(lambda_db_pm > 0.0 && lambda_db_pm.is_finite()) {
        return Err(Error::invalid(format!(
            "de Broglie wavelength must be > 0, got {lambda_db_pm}"
        )));
    }
    let d = geometry.period_nm * 1e-9;
    let xi = geometry.separation_m * lambda_db_pm * 1e-12 / (d * d);
    let all: Vec<Complex64> = (0..=MAX_L_MAX as i64)
        .map(|l| talbot_lau_coefficient(l, xi, geometry))
        .collect();
    let c0 = all[0].re;
    let c1 = all[1].norm();
    // tail_max[l] = max |C_k| over k > l.
    let mut tail_max = vec![0.0f64; all.len()];
    for l in (0..all.len() - 1).rev() {
        tail_max[l] = tail_max[l + 1].max(all[l + 1].norm());
    }
    let l_max = (DEFAULT_L_MAX..=MAX_L_MAX)
        .find(|&l| all[l].norm() <= TRUNCATION_VS_FIRST * c1 && tail_max[l] <= TRUNCATION_VS_MEAN * c0)
        .unwrap_or(MAX_L_MAX);
    FringeCoefficients::from_non_negative(geometry.period_nm, &all[..=l_max])
}
