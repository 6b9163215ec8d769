//! Numerical building blocks: quadrature, ODE integration, small
//! statistics helpers.

pub mod ode;
pub mod quadrature;
pub mod rng;
pub mod stats;

pub use ode::{integrate as integrate_ode, OdeOptions, OdeStats};
pub use quadrature::{integrate, integrate_piecewise, integrate_vec, QuadOptions, QuadResult, QuadVecResult};
pub use rng::molecule_rng;
