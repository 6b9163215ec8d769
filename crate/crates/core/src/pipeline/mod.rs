//! Experiment orchestration: configuration, scenario runs, CSV output.

pub mod config;
pub mod output;
pub mod run;

pub use config::{
    EmissionSection, ExperimentConfig, InterferometerSection, ScanSection, Scenario, SpectrumSection, StageSection,
    MAX_SEED, PRESET_ACTIVATION_ENERGY_EV, PRESET_TRIPLET_SIGMA_CM2,
};
pub use output::{output_path, write_file, write_fit, write_results, write_scans, write_spectrum};
pub use run::{
    export_fringe_scan, export_spectrum, fit_scenario, fringe_scan, run_scenario, FringeScan, PowerPoint, ResultRow,
    ResultTable, Simulator, SpectrumCurve,
};
