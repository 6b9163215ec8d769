//! Adaptive Gauss-Kronrod (7/15) quadrature and fixed Gauss-Legendre rules.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// QUADPACK qk15 abscissae and weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances for [`integrate`]. The iteration stops once the summed error
/// estimate is below `max(abs_tol, rel_tol * |I|)`.
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 0.0,
            rel_tol: 1e-10,
            max_intervals: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

struct Interval {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = half * XGK[j];
        let s = f(center - x) + f(center + x);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    (value, error)
}

/// Integrates `f` over `[a, b]` with globally adaptive bisection of the
/// interval carrying the largest error estimate.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::invalid("quadrature bounds must be finite"));
    }
    let (value, error) = kronrod15(&mut f, a, b);
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    heap.push(Interval { a, b, value, error });
    let mut total = value;
    let mut total_err = error;

    loop {
        let target = opts.abs_tol.max(opts.rel_tol * total.abs());
        if total_err <= target || total_err == 0.0 {
            break;
        }
        if heap.len() >= opts.max_intervals {
            return Err(Error::Quadrature {
                estimate: total_err,
                requested: target,
            });
        }
        let worst = heap.pop().expect("heap is never empty here");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval cannot be split further in floating point.
            return Err(Error::Quadrature {
                estimate: total_err,
                requested: target,
            });
        }
        let (v1, e1) = kronrod15(&mut f, worst.a, mid);
        let (v2, e2) = kronrod15(&mut f, mid, worst.b);
        evaluations += 30;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Interval {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Interval {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }
    // Re-sum to shed the drift of the running updates.
    let value: f64 = heap.iter().map(|i| i.value).sum();
    let error: f64 = heap.iter().map(|i| i.error).sum();
    Ok(QuadResult {
        value,
        error,
        evaluations,
    })
}

struct VecInterval {
    a: f64,
    b: f64,
    value: Vec<f64>,
    error: Vec<f64>,
    priority: f64,
}

impl PartialEq for VecInterval {
    fn eq(&self, other: &Self) -> bool {
        self.priority == other.priority
    }
}
impl Eq for VecInterval {}
impl PartialOrd for VecInterval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for VecInterval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.priority.total_cmp(&other.priority)
    }
}

fn kronrod15_vec<F: FnMut(f64, &mut [f64])>(f: &mut F, a: f64, b: f64, buf: &mut [f64]) -> (Vec<f64>, Vec<f64>) {
    let dim = buf.len();
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kronrod = vec![0.0; dim];
    let mut gauss = vec![0.0; dim];
    f(center, buf);
    for k in 0..dim {
        kronrod[k] = buf[k] * WGK[7];
        gauss[k] = buf[k] * WG[3];
    }
    for j in 0..7 {
        let x = half * XGK[j];
        for sign in [-1.0, 1.0] {
            f(center + sign * x, buf);
            for k in 0..dim {
                kronrod[k] += WGK[j] * buf[k];
                if j % 2 == 1 {
                    gauss[k] += WG[j / 2] * buf[k];
                }
            }
        }
    }
    let err = kronrod
        .iter()
        .zip(&gauss)
        .map(|(k, g)| ((k - g) * half).abs())
        .collect();
    (kronrod.into_iter().map(|k| k * half).collect(), err)
}

/// Vector-valued counterpart of [`integrate`]: `f(x, out)` fills all
/// components at once. Converged when every component meets
/// `max(abs_tol, rel_tol * |I_k|)`.
pub fn integrate_vec<F: FnMut(f64, &mut [f64])>(
    mut f: F,
    a: f64,
    b: f64,
    dim: usize,
    opts: QuadOptions,
) -> Result<QuadVecResult> {
    if a == b || dim == 0 {
        return Ok(QuadVecResult {
            value: vec![0.0; dim],
            error: vec![0.0; dim],
            evaluations: 0,
        });
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::invalid("quadrature bounds must be finite"));
    }
    let mut buf = vec![0.0; dim];
    let (value, error) = kronrod15_vec(&mut f, a, b, &mut buf);
    let mut evaluations = 15;
    let mut total = value.clone();
    let mut total_err = error.clone();
    let scale = |total: &[f64], k: usize| opts.abs_tol.max(opts.rel_tol * total[k].abs()).max(f64::MIN_POSITIVE);
    let priority = |err: &[f64], total: &[f64]| (0..dim).map(|k| err[k] / scale(total, k)).fold(0.0, f64::max);
    let mut heap = BinaryHeap::new();
    heap.push(VecInterval {
        a,
        b,
        priority: priority(&error, &total),
        value,
        error,
    });
    loop {
        let worst_ratio = (0..dim)
            .map(|k| {
                if total_err[k] == 0.0 {
                    0.0
                } else {
                    total_err[k] / scale(&total, k)
                }
            })
            .fold(0.0, f64::max);
        if worst_ratio <= 1.0 {
            break;
        }
        let k_worst = (0..dim)
            .max_by(|&i, &j| (total_err[i] / scale(&total, i)).total_cmp(&(total_err[j] / scale(&total, j))))
            .unwrap_or(0);
        if heap.len() >= opts.max_intervals {
            return Err(Error::Quadrature {
                estimate: total_err[k_worst],
                requested: scale(&total, k_worst),
            });
        }
        let worst = heap.pop().expect("heap is never empty here");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::Quadrature {
                estimate: total_err[k_worst],
                requested: scale(&total, k_worst),
            });
        }
        let (v1, e1) = kronrod15_vec(&mut f, worst.a, mid, &mut buf);
        let (v2, e2) = kronrod15_vec(&mut f, mid, worst.b, &mut buf);
        evaluations += 30;
        for k in 0..dim {
            total[k] += v1[k] + v2[k] - worst.value[k];
            total_err[k] += e1[k] + e2[k] - worst.error[k];
        }
        heap.push(VecInterval {
            a: worst.a,
            b: mid,
            priority: priority(&e1, &total),
            value: v1,
            error: e1,
        });
        heap.push(VecInterval {
            a: mid,
            b: worst.b,
            priority: priority(&e2, &total),
            value: v2,
            error: e2,
        });
    }
    let mut value = vec![0.0; dim];
    let mut error = vec![0.0; dim];
    for iv in heap.iter() {
        for k in 0..dim {
            value[k] += iv.value[k];
            error[k] += iv.error[k];
        }
    }
    Ok(QuadVecResult {
        value,
        error,
        evaluations,
    })
}

#[derive(Debug, Clone)]
pub struct QuadVecResult {
    pub value: Vec<f64>,
    pub error: Vec<f64>,
    pub evaluations: usize,
}

/// Integrates over consecutive breakpoints, so kinks at known abscissae
/// never sit inside a panel.
pub fn integrate_piecewise<F: FnMut(f64) -> f64>(mut f: F, breaks: &[f64], opts: QuadOptions) -> Result<QuadResult> {
    let mut out = QuadResult {
        value: 0.0,
        error: 0.0,
        evaluations: 0,
    };
    for w in breaks.windows(2) {
        let r = integrate(&mut f, w[0], w[1], opts)?;
        out.value += r.value;
        out.error += r.error;
        out.evaluations += r.evaluations;
    }
    Ok(out)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss-Legendre rule over the panels defined by `breaks`,
/// `order` nodes per panel. Returns absolute (node, weight) pairs.
pub fn composite_gauss_legendre(breaks: &[f64], order: usize) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(order);
    let mut out = Vec::with_capacity(order * breaks.len().saturating_sub(1));
    for p in breaks.windows(2) {
        let c = 0.5 * (p[0] + p[1]);
        let h = 0.5 * (p[1] - p[0]);
        for (xi, wi) in x.iter().zip(&w) {
            out.push((c + h * xi, h * wi));
        }
    }
    out
}
