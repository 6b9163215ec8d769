//! Thermophysics of a single hot molecule: micro-canonical temperature,
//! spectral emission rate, radiative cooling and photon sampling.

pub mod cooling;
pub mod cross_section;
pub mod density;
pub mod emission;
pub mod state;

pub use cooling::{cool, CoolingTable, RadiativeLoss};
pub use cross_section::CrossSectionTable;
pub use density::{sample_photon, sinc, SpectralDensity};
pub use emission::{
    radiated_power, spectral_rate_lambda, spectral_rate_omega, total_rate, total_rate_and_density, EmissionModel,
    SpectralGrid, VISIBLE_BAND_NM,
};
pub use state::{micro_temperature, HeatCapacity, InternalState};
