//! Radiative cooling dE/dt = −P(T_m(E)).

use std::ops::ControlFlow;

use crate::error::{Error, Result};
use crate::numerics::ode::{integrate, OdeOptions};
use crate::physics::emission::EmissionModel;
use crate::physics::state::{HeatCapacity, InternalState};

/// Radiated power as a function of temperature.
pub trait RadiativeLoss: Send + Sync {
    /// Power in eV/s at micro-canonical temperature `t_m`.
    fn power_ev_per_s(&self, t_m: f64) -> f64;
    fn heat_capacity(&self) -> &HeatCapacity;

    fn power_at_energy(&self, energy_ev: f64) -> f64 {
        self.power_ev_per_s(self.heat_capacity().temperature_k(energy_ev))
    }
}

impl RadiativeLoss for EmissionModel {
    fn power_ev_per_s(&self, t_m: f64) -> f64 {
        self.grid().rate_and_power(t_m, self.heat_capacity()).1
    }

    fn heat_capacity(&self) -> &HeatCapacity {
        EmissionModel::heat_capacity(self)
    }
}

/// Tolerances used by [`cool`].
pub fn cooling_options() -> OdeOptions {
    OdeOptions {
        rtol: 1e-8,
        atol: 1e-10,
        ..OdeOptions::default()
    }
}

/// Cools `state` radiatively for `dt` seconds.
pub fn cool<L: RadiativeLoss + ?Sized>(state: &InternalState, dt: f64, loss: &L) -> Result<InternalState> {
    if !(dt >= 0.0) || !dt.is_finite() {
        return Err(Error::invalid(format!(
            "cooling interval must be finite and >= 0, got {dt}"
        )));
    }
    let e0 = state.energy_ev();
    if dt == 0.0 || e0 == 0.0 {
        return Ok(*state);
    }
    let mut y = [e0];
    integrate(
        |_, y, d| d[0] = -loss.power_at_energy(y[0].max(0.0)),
        0.0,
        dt,
        &mut y,
        &cooling_options(),
        |_, _| ControlFlow::Continue(()),
    )?;
    Ok(InternalState::saturating(y[0].min(e0)))
}

/// ln P tabulated on a uniform ln T grid with cubic (Catmull-Rom)
/// interpolation. Falls back to the spectral grid outside its range.
#[derive(Debug, Clone)]
pub struct CoolingTable {
    model: EmissionModel,
    ln_t0: f64,
    step: f64,
    ln_rate: Vec<f64>,
    ln_power: Vec<f64>,
}

const TABLE_T_MIN: f64 = 100.0;
const TABLE_T_MAX: f64 = 30_000.0;
const TABLE_NODES: usize = 4096;

impl CoolingTable {
    pub fn new(model: &EmissionModel) -> Self {
        let ln_t0 = TABLE_T_MIN.ln();
        let step = (TABLE_T_MAX.ln() - ln_t0) / (TABLE_NODES - 1) as f64;
        let mut ln_rate = Vec::with_capacity(TABLE_NODES);
        let mut ln_power = Vec::with_capacity(TABLE_NODES);
        for i in 0..TABLE_NODES {
            let t = (ln_t0 + step * i as f64).exp();
            let (r, p) = model.grid().rate_and_power(t, model.heat_capacity());
            ln_rate.push(r.max(f64::MIN_POSITIVE).ln());
            ln_power.push(p.max(f64::MIN_POSITIVE).ln());
        }
        Self {
            model: model.clone(),
            ln_t0,
            step,
            ln_rate,
            ln_power,
        }
    }

    pub fn model(&self) -> &EmissionModel {
        &self.model
    }

    fn interpolate(&self, values: &[f64], t_m: f64) -> Option<f64> {
        if !(TABLE_T_MIN..=TABLE_T_MAX).contains(&t_m) {
            return None;
        }
        let s = (t_m.ln() - self.ln_t0) / self.step;
        let n = values.len();
        let i = (s.floor() as usize).min(n - 2);
        let u = s - i as f64;
        let y0 = values[i];
        let y1 = values[i + 1];
        let ym = if i > 0 { values[i - 1] } else { 2.0 * y0 - y1 };
        let y2 = if i + 2 < n { values[i + 2] } else { 2.0 * y1 - y0 };
        let m0 = 0.5 * (y1 - ym);
        let m1 = 0.5 * (y2 - y0);
        let u2 = u * u;
        let u3 = u2 * u;
        Some((2.0 * u3 - 3.0 * u2 + 1.0) * y0 + (u3 - 2.0 * u2 + u) * m0 + (-2.0 * u3 + 3.0 * u2) * y1 + (u3 - u2) * m1)
    }

    /// Total emission rate, photons/s.
    pub fn rate(&self, t_m: f64) -> f64 {
        if !(t_m > 0.0) {
            return 0.0;
        }
        match self.interpolate(&self.ln_rate, t_m) {
            Some(v) => v.exp(),
            None => self.model.grid().rate_and_power(t_m, self.model.heat_capacity()).0,
        }
    }

    /// Rate inside the model's photon band, photons/s (direct grid sum).
    pub fn band_rate(&self, t_m: f64) -> f64 {
        self.model.band_rate(t_m)
    }
}

impl RadiativeLoss for CoolingTable {
    fn power_ev_per_s(&self, t_m: f64) -> f64 {
        if !(t_m > 0.0) {
            return 0.0;
        }
        match self.interpolate(&self.ln_power, t_m) {
            Some(v) => v.exp(),
            None => self.model.grid().rate_and_power(t_m, self.model.heat_capacity()).1,
        }
    }

    fn heat_capacity(&self) -> &HeatCapacity {
        self.model.heat_capacity()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::CrossSectionTable;

    fn model() -> EmissionModel {
        EmissionModel::new(CrossSectionTable::default_surrogate(), HeatCapacity::default()).unwrap()
    }

    #[test]
    fn zero_interval_is_identity() {
        let m = model();
        let s = InternalState::from_temperature(4000.0, m.heat_capacity()).unwrap();
        assert_eq!(cool(&s, 0.0, &m).unwrap(), s);
        assert!(cool(&s, -1.0, &m).is_err());
    }

    #[test]
    fn cooling_never_heats() {
        let m = model();
        let s = InternalState::from_temperature(4500.0, m.heat_capacity()).unwrap();
        let a = cool(&s, 1e-5, &m).unwrap();
        let b = cool(&s, 1e-4, &m).unwrap();
        assert!(a.energy_ev() < s.energy_ev());
        assert!(b.energy_ev() < a.energy_ev());
    }

    #[test]
    fn semigroup() {
        let m = model();
        let s = InternalState::from_temperature(5000.0, m.heat_capacity()).unwrap();
        let once = cool(&s, 3e-4, &m).unwrap();
        let twice = cool(&cool(&s, 1e-4, &m).unwrap(), 2e-4, &m).unwrap();
        assert!(((once.energy_ev() - twice.energy_ev()) / once.energy_ev()).abs() < 1e-7);
    }

    #[test]
    fn table_matches_direct_power() {
        let m = model();
        let table = CoolingTable::new(&m);
        for i in 0..200 {
            let t = 300.0 + 100.0 * i as f64 + 7.3;
            let direct = m.power_ev_per_s(t);
            let tab = table.power_ev_per_s(t);
            assert!(((tab - direct) / direct).abs() < 1e-7, "T={t}");
            let r = m.grid().rate_and_power(t, m.heat_capacity()).0;
            assert!(((table.rate(t) - r) / r).abs() < 1e-7, "T={t}");
        }
        assert_eq!(table.power_ev_per_s(0.0), 0.0);
    }
}
