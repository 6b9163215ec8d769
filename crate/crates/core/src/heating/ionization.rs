use crate::error::Result;
use crate::heating::config::IonizationModel;
use crate::heating::trajectory::TemperatureTrajectory;
use crate::numerics::quadrature::{integrate_piecewise, QuadOptions};
use crate::physics::HeatCapacity;

/// Probability of escaping ionization over `[t0, t1]` of `traj`,
/// exp(−∫A·exp(−E_a/k_BT(t)) dt), with T(t) interpolated between samples.
pub fn ionization_survival(
    traj: &TemperatureTrajectory,
    t0: f64,
    t1: f64,
    model: &IonizationModel,
    cv: &HeatCapacity,
) -> Result<f64> {
    Ok((-ionization_hazard(traj, t0, t1, model, cv)?).exp())
}

/// The exponent ∫A·exp(−E_a/k_BT(t)) dt of [`ionization_survival`].
pub fn ionization_hazard(
    traj: &TemperatureTrajectory,
    t0: f64,
    t1: f64,
    model: &IonizationModel,
    cv: &HeatCapacity,
) -> Result<f64> {
    if !(t1 > t0) {
        return Ok(0.0);
    }
    let breaks = traj.breaks_within(t0, t1);
    let opts = QuadOptions {
        abs_tol: 1e-300,
        rel_tol: 1e-10,
        max_intervals: 2000,
    };
    let r = integrate_piecewise(|t| model.rate(traj.temperature_at(t, cv)), &breaks, opts)?;
    Ok(r.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::BOLTZMANN_EV;

    #[test]
    fn cold_molecule_survives() {
        let tr = TemperatureTrajectory::constant(190.0, 0.0, 0.0, 1e-3).unwrap();
        let s = ionization_survival(&tr, 0.0, 1e-3, &IonizationModel::default(), &HeatCapacity::default()).unwrap();
        assert_eq!(s, 1.0);
    }

    #[test]
    fn constant_temperature_closed_form() {
        let cv = HeatCapacity::default();
        let tr = TemperatureTrajectory::constant(190.0, cv.energy_ev(3000.0), 0.0, 1e-6).unwrap();
        let m = IonizationModel::default();
        let s = ionization_survival(&tr, 0.0, 1e-6, &m, &cv).unwrap();
        let expect = (-5e9 * (-7.6 / (BOLTZMANN_EV * 3000.0)).exp() * 1e-6).exp();
        assert!((s - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn survival_is_multiplicative_and_decreasing() {
        let cv = HeatCapacity::default();
        let tr = TemperatureTrajectory::new(
            190.0,
            vec![
                (0.0, cv.energy_ev(5000.0)),
                (2e-6, cv.energy_ev(4000.0)),
                (5e-6, cv.energy_ev(4500.0)),
            ],
        )
        .unwrap();
        let m = IonizationModel {
            prefactor_per_s: 5e9,
            activation_energy_ev: 5.0,
        };
        let whole = ionization_survival(&tr, 0.0, 5e-6, &m, &cv).unwrap();
        let a = ionization_survival(&tr, 0.0, 1.3e-6, &m, &cv).unwrap();
        let b = ionization_survival(&tr, 1.3e-6, 5e-6, &m, &cv).unwrap();
        assert!((whole - a * b).abs() < 1e-10 * whole);
        assert!(whole < a && whole > 0.0 && a <= 1.0);
    }
}
