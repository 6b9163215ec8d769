//! Multi-pass laser heating stage: photon absorption, radiative cooling
//! between and after the beams, thermal ionization, and ion-yield
//! thermometry.

pub mod config;
pub mod ionization;
pub mod stage;
pub mod thermometry;
pub mod trajectory;

pub use config::{
    mean_absorbed_photons, mean_absorbed_photons_offset, HeatingStageConfig, IonizationModel, LaserBeam,
    VelocityDistribution, MAX_BEAMS,
};
pub use ionization::{ionization_hazard, ionization_survival};
pub use stage::{traverse_stage, HeatingStage};
pub use thermometry::{
    d1_ion_yield, fit_heating_params, parse_observations, read_observations, FitOptions, HeatingFit, IonYield,
    IonYieldObservation,
};
pub use trajectory::{Absorption, TemperatureTrajectory};
