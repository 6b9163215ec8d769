//! Dormand-Prince 5(4) embedded Runge-Kutta integrator with adaptive step
//! size control.

use std::ops::ControlFlow;

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Difference between the 5th and embedded 4th order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; chosen automatically when `None`.
    pub initial_step: Option<f64>,
    /// Largest allowed step; unbounded when `None`.
    pub max_step: Option<f64>,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-12,
            initial_step: None,
            max_step: None,
            max_steps: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
    /// Time reached; smaller than the requested end only if the observer
    /// broke off the integration.
    pub t_end: f64,
}

/// Integrates `y' = f(t, y)` from `t0` to `t1` in place. `observer` sees
/// the state after every accepted step and may stop the integration early.
pub fn integrate<F, O>(
    mut f: F,
    t0: f64,
    t1: f64,
    y: &mut [f64],
    opts: &OdeOptions,
    mut observer: O,
) -> Result<OdeStats>
where
    F: FnMut(f64, &[f64], &mut [f64]),
    O: FnMut(f64, &[f64]) -> ControlFlow<()>,
{
    let n = y.len();
    let mut stats = OdeStats {
        t_end: t0,
        ..OdeStats::default()
    };
    if t1 == t0 {
        return Ok(stats);
    }
    if !(t1 > t0) {
        return Err(Error::invalid("integration interval must run forward in time"));
    }
    let span = t1 - t0;
    let mut k = vec![vec![0.0; n]; 7];
    let mut ytmp = vec![0.0; n];
    let mut ynew = vec![0.0; n];

    f(t0, y, &mut k[0]);
    stats.evaluations += 1;

    let max_step = opts.max_step.unwrap_or(span).min(span);
    let mut h = match opts.initial_step {
        Some(h) => h.min(max_step),
        None => initial_step(&mut f, t0, span, y, &k[0], opts, &mut ytmp, &mut ynew, &mut stats).min(max_step),
    };
    let h_floor = 1e-14 * t0.abs().max(t1.abs()).max(span);
    let mut t = t0;

    while t < t1 {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::StepSizeUnderflow { time: t, step: h });
        }
        let last = t + h >= t1 || (t1 - (t + h)) < h_floor;
        if last {
            h = t1 - t;
        }

        for i in 0..n {
            ytmp[i] = y[i] + h * A21 * k[0][i];
        }
        f(t + C2 * h, &ytmp, &mut k[1]);
        for i in 0..n {
            ytmp[i] = y[i] + h * (A31 * k[0][i] + A32 * k[1][i]);
        }
        f(t + C3 * h, &ytmp, &mut k[2]);
        for i in 0..n {
            ytmp[i] = y[i] + h * (A41 * k[0][i] + A42 * k[1][i] + A43 * k[2][i]);
        }
        f(t + C4 * h, &ytmp, &mut k[3]);
        for i in 0..n {
            ytmp[i] = y[i] + h * (A51 * k[0][i] + A52 * k[1][i] + A53 * k[2][i] + A54 * k[3][i]);
        }
        f(t + C5 * h, &ytmp, &mut k[4]);
        for i in 0..n {
            ytmp[i] = y[i] + h * (A61 * k[0][i] + A62 * k[1][i] + A63 * k[2][i] + A64 * k[3][i] + A65 * k[4][i]);
        }
        f(t + h, &ytmp, &mut k[5]);
        for i in 0..n {
            ynew[i] = y[i] + h * (B1 * k[0][i] + B3 * k[2][i] + B4 * k[3][i] + B5 * k[4][i] + B6 * k[5][i]);
        }
        f(t + h, &ynew, &mut k[6]);
        stats.evaluations += 6;

        let mut err2 = 0.0;
        for i in 0..n {
            let e = h * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i] + E6 * k[5][i] + E7 * k[6][i]);
            let scale = opts.atol + opts.rtol * y[i].abs().max(ynew[i].abs());
            err2 += (e / scale).powi(2);
        }
        let err = (err2 / n as f64).sqrt();

        if err.is_finite() && err <= 1.0 {
            t = if last { t1 } else { t + h };
            y.copy_from_slice(&ynew);
            k.swap(0, 6);
            stats.accepted += 1;
            stats.t_end = t;
            if observer(t, y).is_break() {
                return Ok(stats);
            }
            let fac = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h = (h * fac).min(max_step);
        } else {
            stats.rejected += 1;
            let fac = if err.is_finite() {
                (0.9 * err.powf(-0.2)).clamp(0.1, 0.9)
            } else {
                0.1
            };
            h *= fac;
            if h < h_floor {
                return Err(Error::StepSizeUnderflow { time: t, step: h });
            }
        }
    }
    Ok(stats)
}

#[allow(clippy::too_many_arguments)]
fn initial_step<F>(
    f: &mut F,
    t0: f64,
    span: f64,
    y: &[f64],
    f0: &[f64],
    opts: &OdeOptions,
    ytmp: &mut [f64],
    f1: &mut [f64],
    stats: &mut OdeStats,
) -> f64
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    // Hairer, Norsett & Wanner, starting step heuristic.
    let n = y.len() as f64;
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for i in 0..y.len() {
        let sc = opts.atol + opts.rtol * y[i].abs();
        d0 += (y[i] / sc).powi(2);
        d1 += (f0[i] / sc).powi(2);
    }
    let d0 = (d0 / n).sqrt();
    let d1 = (d1 / n).sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6 * span
    } else {
        (0.01 * d0 / d1).min(span)
    };
    for i in 0..y.len() {
        ytmp[i] = y[i] + h0 * f0[i];
    }
    f(t0 + h0, ytmp, f1);
    stats.evaluations += 1;
    let mut d2 = 0.0;
    for i in 0..y.len() {
        let sc = opts.atol + opts.rtol * y[i].abs();
        d2 += ((f1[i] - f0[i]) / sc).powi(2);
    }
    let d2 = (d2 / n).sqrt() / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6 * span)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(f: impl FnMut(f64, &[f64], &mut [f64]), t1: f64, y: &mut [f64], rtol: f64) -> OdeStats {
        let opts = OdeOptions {
            rtol,
            atol: 1e-14,
            ..OdeOptions::default()
        };
        integrate(f, 0.0, t1, y, &opts, |_, _| ControlFlow::Continue(())).unwrap()
    }

    #[test]
    fn exponential_decay() {
        let mut y = [1.0];
        run(|_, y, d| d[0] = -3.0 * y[0], 2.0, &mut y, 1e-10);
        assert!((y[0] - (-6.0f64).exp()).abs() / (-6.0f64).exp() < 1e-8);
    }

    #[test]
    fn harmonic_oscillator_energy() {
        let mut y = [1.0, 0.0];
        run(
            |_, y, d| {
                d[0] = y[1];
                d[1] = -y[0];
            },
            20.0,
            &mut y,
            1e-11,
        );
        assert!((y[0] - 20f64.cos()).abs() < 1e-8);
        assert!((y[1] + 20f64.sin()).abs() < 1e-8);
    }

    #[test]
    fn time_dependent_rhs() {
        // y' = t^2 -> y = t^3 / 3
        let mut y = [0.0];
        run(|t, _, d| d[0] = t * t, 3.0, &mut y, 1e-12);
        assert!((y[0] - 9.0).abs() < 1e-10);
    }

    #[test]
    fn observer_can_stop() {
        let mut y = [0.0];
        let opts = OdeOptions {
            max_step: Some(0.01),
            ..OdeOptions::default()
        };
        let s = integrate(
            |_, _, d| d[0] = 1.0,
            0.0,
            1.0,
            &mut y,
            &opts,
            |_, y| {
                if y[0] > 0.5 {
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            },
        )
        .unwrap();
        assert!(s.t_end < 0.52 && s.t_end > 0.5);
    }

    #[test]
    fn reports_underflow() {
        // Finite-time blow-up at t = 1.
        let mut y = [1.0];
        let opts = OdeOptions::default();
        let r = integrate(
            |_, y, d| d[0] = y[0] * y[0],
            0.0,
            2.0,
            &mut y,
            &opts,
            |_, _| ControlFlow::Continue(()),
        );
        assert!(matches!(r, Err(Error::StepSizeUnderflow { .. })));
    }
}
