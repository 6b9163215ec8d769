use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::constants::AMU_KG;
use crate::error::{Error, Result};
use crate::heating::{HeatingStageConfig, IonizationModel, LaserBeam, VelocityDistribution, MAX_BEAMS};
use crate::interferometer::{Baseline, DetectorModel, InterferometerGeometry, DEFAULT_L_MAX};
use crate::physics::{CrossSectionTable, EmissionModel, HeatCapacity, VISIBLE_BAND_NM};

/// Triplet absorption cross-section used by the built-in presets, cm².
pub const PRESET_TRIPLET_SIGMA_CM2: f64 = 6.8e-18;
/// Arrhenius activation energy used by the built-in presets, eV.
pub const PRESET_ACTIVATION_ENERGY_EV: f64 = 5.5;

/// Largest master seed; config files store it as a signed 64-bit integer.
pub const MAX_SEED: u64 = i64::MAX as u64;

/// Built-in experiment presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    /// Fringe scans and count rate at 190 m/s, 16 beams.
    Fig2,
    /// Emission spectra.
    Fig3,
    /// Visibility vs power at 190 m/s, 16 beams.
    Fig4a,
    /// Visibility vs power at 100 m/s, 10 beams.
    Fig4b,
    /// Everything from a config file.
    Custom,
}

impl Scenario {
    pub const ALL: [Scenario; 5] = [
        Scenario::Fig2,
        Scenario::Fig3,
        Scenario::Fig4a,
        Scenario::Fig4b,
        Scenario::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Fig2 => "fig2",
            Scenario::Fig3 => "fig3",
            Scenario::Fig4a => "fig4a",
            Scenario::Fig4b => "fig4b",
            Scenario::Custom => "custom",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL.into_iter().find(|sc| sc.name() == s).ok_or_else(|| {
            Error::Config(format!(
                "unknown scenario `{s}` (expected fig2, fig3, fig4a, fig4b or custom)"
            ))
        })
    }
}

/// Heating stage as written in a config file: `beam_count` identical beams.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StageSection {
    pub beam_count: usize,
    pub waist_um: f64,
    pub wavelength_nm: f64,
    pub beam_spacing_mm: f64,
    pub drift_cm: f64,
    pub triplet_sigma_cm2: f64,
    pub initial_temperature_k: f64,
    pub beam_offset_um: f64,
    pub transverse_spread_um: f64,
    pub ionization: IonizationModel,
}

impl Default for StageSection {
    fn default() -> Self {
        let base = HeatingStageConfig::default();
        let beam = LaserBeam::new(0.0);
        Self {
            beam_count: MAX_BEAMS,
            waist_um: beam.waist_um,
            wavelength_nm: beam.wavelength_nm,
            beam_spacing_mm: base.beam_spacing_mm,
            drift_cm: base.drift_cm,
            triplet_sigma_cm2: PRESET_TRIPLET_SIGMA_CM2,
            initial_temperature_k: base.initial_temperature_k,
            beam_offset_um: 0.0,
            transverse_spread_um: 0.0,
            ionization: IonizationModel {
                activation_energy_ev: PRESET_ACTIVATION_ENERGY_EV,
                ..IonizationModel::default()
            },
        }
    }
}

impl StageSection {
    /// Stage with every beam at `power_w`.
    pub fn stage(&self, power_w: f64) -> Result<HeatingStageConfig> {
        let beam = LaserBeam {
            power_w,
            waist_um: self.waist_um,
            wavelength_nm: self.wavelength_nm,
        };
        let cfg = HeatingStageConfig {
            beams: vec![beam; self.beam_count],
            beam_spacing_mm: self.beam_spacing_mm,
            drift_cm: self.drift_cm,
            triplet_sigma_cm2: self.triplet_sigma_cm2,
            ionization: self.ionization,
            initial_temperature_k: self.initial_temperature_k,
            beam_offset_um: self.beam_offset_um,
            transverse_spread_um: self.transverse_spread_um,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmissionSection {
    /// Two-column (wavelength nm, σ m²) table; the built-in surrogate when
    /// absent. Relative paths resolve against the config file.
    pub cross_section_path: Option<PathBuf>,
    pub cutoff_ev: f64,
    pub heat_capacity_kb: f64,
    pub heat_capacity_slope_kb_per_k: f64,
    pub visible_band_nm: [f64; 2],
}

impl EmissionSection {
    pub fn heat_capacity(&self) -> HeatCapacity {
        HeatCapacity {
            constant_kb: self.heat_capacity_kb,
            slope_kb_per_k: self.heat_capacity_slope_kb_per_k,
        }
    }
}

impl Default for EmissionSection {
    fn default() -> Self {
        Self {
            cross_section_path: None,
            cutoff_ev: crate::physics::cross_section::DEFAULT_CUTOFF_EV,
            heat_capacity_kb: HeatCapacity::default().constant_kb,
            heat_capacity_slope_kb_per_k: 0.0,
            visible_band_nm: [VISIBLE_BAND_NM.0, VISIBLE_BAND_NM.1],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InterferometerSection {
    pub period_nm: f64,
    pub slit_width_nm: f64,
    pub separation_m: f64,
    pub molecule_mass_amu: f64,
    pub baseline: Baseline,
    /// Harmonic orders kept in ensemble-averaged fringe patterns.
    pub pattern_harmonics: usize,
    /// Cooling steps recorded between the first and third grating.
    pub trajectory_intervals: usize,
}

impl Default for InterferometerSection {
    fn default() -> Self {
        let g = InterferometerGeometry::default();
        Self {
            period_nm: g.period_nm,
            slit_width_nm: g.slit_width_nm,
            separation_m: g.separation_m,
            molecule_mass_amu: g.molecule_mass_kg / AMU_KG,
            baseline: Baseline::default(),
            pattern_harmonics: DEFAULT_L_MAX,
            trajectory_intervals: 32,
        }
    }
}

impl InterferometerSection {
    pub fn geometry(&self) -> InterferometerGeometry {
        InterferometerGeometry {
            period_nm: self.period_nm,
            slit_width_nm: self.slit_width_nm,
            separation_m: self.separation_m,
            molecule_mass_kg: self.molecule_mass_amu * AMU_KG,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumSection {
    pub temperatures_k: Vec<f64>,
    pub lambda_min_nm: f64,
    pub lambda_max_nm: f64,
    pub step_nm: f64,
}

impl Default for SpectrumSection {
    fn default() -> Self {
        Self {
            temperatures_k: vec![1500.0, 2000.0, 2500.0, 3000.0, 3500.0],
            lambda_min_nm: 200.0,
            lambda_max_nm: 1000.0,
            step_nm: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanSection {
    pub powers_w: Vec<f64>,
    /// Positions per grating period.
    pub points: usize,
}

impl Default for ScanSection {
    fn default() -> Self {
        Self {
            powers_w: vec![0.0, 3.0, 6.0, 10.5],
            points: 100,
        }
    }
}

/// Everything one run needs. Missing keys take the fig4a values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: String,
    pub seed: u64,
    pub ensemble_size: usize,
    pub powers_w: Vec<f64>,
    pub output_dir: PathBuf,
    pub velocity: VelocityDistribution,
    pub stage: StageSection,
    pub emission: EmissionSection,
    pub interferometer: InterferometerSection,
    pub detector: DetectorModel,
    pub spectrum: SpectrumSection,
    pub scan: ScanSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scenario: Scenario::Custom.name().to_string(),
            seed: 1,
            ensemble_size: 2000,
            powers_w: vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0, 10.5],
            output_dir: PathBuf::from("out"),
            velocity: VelocityDistribution {
                mean_mps: 190.0,
                relative_spread: 0.15,
            },
            stage: StageSection::default(),
            emission: EmissionSection::default(),
            interferometer: InterferometerSection::default(),
            detector: DetectorModel::default(),
            spectrum: SpectrumSection::default(),
            scan: ScanSection::default(),
        }
    }
}

impl ExperimentConfig {
    /// Built-in preset; `Custom` has none.
    pub fn preset(scenario: Scenario) -> Result<Self> {
        let base = Self::default();
        let cfg = match scenario {
            Scenario::Fig2 | Scenario::Fig3 | Scenario::Fig4a => Self {
                scenario: scenario.name().to_string(),
                ..base
            },
            Scenario::Fig4b => Self {
                scenario: scenario.name().to_string(),
                powers_w: (0..=10).map(f64::from).collect(),
                velocity: VelocityDistribution {
                    mean_mps: 100.0,
                    relative_spread: 0.15,
                },
                stage: StageSection {
                    beam_count: 10,
                    ..StageSection::default()
                },
                interferometer: InterferometerSection {
                    baseline: Baseline::Anchored { visibility: 0.19 },
                    ..InterferometerSection::default()
                },
                scan: ScanSection {
                    powers_w: vec![0.0, 2.0, 4.0, 8.0],
                    ..ScanSection::default()
                },
                ..base
            },
            Scenario::Custom => {
                return Err(Error::Config("scenario `custom` needs a config file".into()));
            }
        };
        Ok(cfg)
    }

    /// Parses a TOML document. `origin` names it in error messages.
    pub fn from_toml_str(text: &str, origin: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(format!("{origin}: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a TOML config; a relative cross-section path is resolved
    /// against the file's directory.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io_path("read config", path, e))?;
        let mut cfg = Self::from_toml_str(&text, &path.display().to_string())?;
        if let (Some(p), Some(dir)) = (cfg.emission.cross_section_path.as_mut(), path.parent()) {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.scenario.trim().is_empty() {
            return bad("scenario id must not be empty".into());
        }
        if self.seed > MAX_SEED {
            return bad(format!(
                "seed must be <= {MAX_SEED} (TOML integers are signed), got {}",
                self.seed
            ));
        }
        if self.ensemble_size == 0 {
            return bad("ensemble_size must be >= 1".into());
        }
        if self.powers_w.is_empty() {
            return bad("powers_w must list at least one power".into());
        }
        if self
            .powers_w
            .iter()
            .chain(&self.scan.powers_w)
            .any(|p| !(*p >= 0.0 && p.is_finite()))
        {
            return bad("powers must be finite and >= 0".into());
        }
        if self.scan.points < 2 {
            return bad("scan.points must be >= 2".into());
        }
        if self.interferometer.pattern_harmonics == 0 || self.interferometer.trajectory_intervals == 0 {
            return bad("pattern_harmonics and trajectory_intervals must be >= 1".into());
        }
        let s = &self.spectrum;
        if !(s.lambda_min_nm > 0.0 && s.lambda_max_nm > s.lambda_min_nm && s.step_nm > 0.0) {
            return bad("spectrum needs 0 < lambda_min_nm < lambda_max_nm and step_nm > 0".into());
        }
        if s.temperatures_k.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return bad("spectrum temperatures must be finite and >= 0".into());
        }
        let [lo, hi] = self.emission.visible_band_nm;
        if !(lo > 0.0 && hi > lo) {
            return bad("visible_band_nm must satisfy 0 < lo < hi".into());
        }
        let wrap = |e: Error| Error::Config(e.to_string());
        self.velocity.validate().map_err(wrap)?;
        self.stage.stage(0.0).map_err(wrap)?;
        self.emission.heat_capacity().validate().map_err(wrap)?;
        self.interferometer.geometry().validate().map_err(wrap)?;
        self.detector.validate().map_err(wrap)?;
        if let Baseline::Anchored { visibility } = self.interferometer.baseline {
            if !(0.0..=1.0).contains(&visibility) {
                return bad(format!("baseline visibility must lie in [0, 1], got {visibility}"));
            }
        }
        Ok(())
    }

    /// Cross-section table named by the config, or the built-in surrogate.
    pub fn cross_section(&self) -> Result<CrossSectionTable> {
        match &self.emission.cross_section_path {
            Some(p) => CrossSectionTable::from_path(p, self.emission.cutoff_ev),
            None if self.emission.cutoff_ev == crate::physics::cross_section::DEFAULT_CUTOFF_EV => {
                Ok(CrossSectionTable::default_surrogate())
            }
            None => {
                let s = CrossSectionTable::default_surrogate();
                CrossSectionTable::new(
                    s.wavelengths_nm().to_vec(),
                    s.sigma_m2().to_vec(),
                    self.emission.cutoff_ev,
                )
            }
        }
    }

    pub fn emission_model(&self) -> Result<EmissionModel> {
        let [lo, hi] = self.emission.visible_band_nm;
        EmissionModel::with_band(self.cross_section()?, self.emission.heat_capacity(), (lo, hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_encode_the_setup() {
        let a = ExperimentConfig::preset(Scenario::Fig4a).unwrap();
        let g = a.interferometer.geometry();
        assert_eq!((g.period_nm, g.separation_m), (991.0, 0.38));
        let st = a.stage.stage(1.0).unwrap();
        assert_eq!(st.beams.len(), 16);
        assert_eq!((st.beams[0].waist_um, st.beams[0].wavelength_nm), (40.0, 514.5));
        assert_eq!((st.beam_spacing_mm, st.drift_cm), (0.3, 7.2));
        assert_eq!(a.velocity.mean_mps, 190.0);
        let b = ExperimentConfig::preset(Scenario::Fig4b).unwrap();
        assert_eq!(b.stage.beam_count, 10);
        assert_eq!(b.velocity.mean_mps, 100.0);
        assert_eq!(b.interferometer.baseline, Baseline::Anchored { visibility: 0.19 });
        assert!(ExperimentConfig::preset(Scenario::Custom).is_err());
    }

    #[test]
    fn toml_round_trip() {
        let a = ExperimentConfig::preset(Scenario::Fig4b).unwrap();
        let text = a.to_toml_string().unwrap();
        let b = ExperimentConfig::from_toml_str(&text, "mem").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(ExperimentConfig::from_toml_str("ensemble_size = 0", "mem").is_err());
        assert!(ExperimentConfig::from_toml_str("powers_w = [-1.0]", "mem").is_err());
        assert!(ExperimentConfig::from_toml_str("nonsense = 1", "mem").is_err());
        assert!(ExperimentConfig::from_toml_str("[stage]\nbeam_count = 17", "mem").is_err());
        assert!("fig5".parse::<Scenario>().is_err());
        assert_eq!("fig4b".parse::<Scenario>().unwrap(), Scenario::Fig4b);
    }
}
