//! Talbot-Lau fringe formation and its loss of contrast through thermal
//! photon emission.

pub mod coefficients;
pub mod decoherence;
pub mod geometry;
pub mod visibility;

pub use coefficients::{
    base_coefficients, fringe_pattern, grating_amplitude, overlap_coefficient, pattern_visibility,
    talbot_lau_coefficient, FringeCoefficients, DEFAULT_L_MAX, MAX_L_MAX,
};
pub use decoherence::{apply_single_emission, decoherence_function, one_minus_sinc, EmissionEvent};
pub use geometry::{de_broglie_and_talbot, InterferometerGeometry};
pub use visibility::{
    closed_form_visibility, ensemble_from_decays, ensemble_visibility, evolve_visibility_ode, Baseline, Decay,
    DetectorModel, EnsembleVisibility, Harmonics, Interferometer, VisibilityResult,
};
