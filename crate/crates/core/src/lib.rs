//! Thermal-emission decoherence of laser-heated molecules in a three-grating
//! Talbot-Lau interferometer.
//!
//! * [`heating`]: laser heating stage, ionization, ion-yield fit
//! * [`interferometer`]: fringe coefficients, decoherence, visibility
//! * [`pipeline`]: scenario configuration, ensemble runs, CSV export
//! * [`physics`]: micro-canonical emission spectrum, cooling, photon sampling
//! * [`numerics`]: quadrature, ODE integration, running statistics

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod error;
pub mod heating;
pub mod interferometer;
pub mod numerics;
pub mod physics;
pub mod pipeline;

pub use error::{Error, Result};
