//! Tabulated absorption cross-section σ_abs(λ).
//!
//! File format: two whitespace- or comma-separated columns
//! `wavelength_nm sigma_m2`, one row per line, `#` starts a comment, the
//! first column strictly increasing.

use std::io::BufRead;
use std::path::Path;

use crate::constants::{photon_energy_ev, wavelength_nm_from_energy_ev};
use crate::error::{Error, Result};

/// Photon energy below which the molecule has no radiative transitions.
pub const DEFAULT_CUTOFF_EV: f64 = 1.5;

// Shape of the shipped surrogate: sigma(E) = scale * (u^2 + w * u^10) with
// u = (E - cutoff) / cutoff, tabulated every 10 nm from 200 to 1000 nm.
// The scale makes a 2500 K molecule emit 3 photons between 400 and 800 nm
// in 4 ms; see `calibrated_scale_reproduces_visible_anchor`.
const SURROGATE_LOW_EXPONENT: i32 = 2;
const SURROGATE_UV_EXPONENT: i32 = 10;
const SURROGATE_UV_WEIGHT: f64 = 0.05;
pub(crate) const SURROGATE_SCALE_M2: f64 = 6.5296e-21;
const SURROGATE_FIRST_NM: f64 = 200.0;
const SURROGATE_STEP_NM: f64 = 10.0;
const SURROGATE_POINTS: usize = 81;

#[derive(Debug, Clone, PartialEq)]
pub struct CrossSectionTable {
    wavelengths_nm: Vec<f64>,
    sigma_m2: Vec<f64>,
    cutoff_ev: f64,
}

impl CrossSectionTable {
    pub fn new(wavelengths_nm: Vec<f64>, sigma_m2: Vec<f64>, cutoff_ev: f64) -> Result<Self> {
        if wavelengths_nm.len() != sigma_m2.len() {
            return Err(Error::invalid("cross-section columns differ in length"));
        }
        if wavelengths_nm.len() < 2 {
            return Err(Error::invalid("cross-section table needs at least two rows"));
        }
        if !(cutoff_ev > 0.0 && cutoff_ev.is_finite()) {
            return Err(Error::invalid(format!("cutoff must be > 0 eV, got {cutoff_ev}")));
        }
        for w in wavelengths_nm.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::invalid(format!(
                    "wavelengths must be strictly increasing ({} then {})",
                    w[0], w[1]
                )));
            }
        }
        if wavelengths_nm[0] <= 0.0 || !wavelengths_nm.iter().all(|x| x.is_finite()) {
            return Err(Error::invalid("wavelengths must be finite and > 0"));
        }
        if let Some(bad) = sigma_m2.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
            return Err(Error::invalid(format!(
                "cross-sections must be finite and >= 0, got {bad}"
            )));
        }
        Ok(Self {
            wavelengths_nm,
            sigma_m2,
            cutoff_ev,
        })
    }

    /// The shipped smooth surrogate for C70.
    pub fn default_surrogate() -> Self {
        Self::surrogate_with_scale(SURROGATE_SCALE_M2)
    }

    pub(crate) fn surrogate_with_scale(scale_m2: f64) -> Self {
        let wavelengths: Vec<f64> = (0..SURROGATE_POINTS)
            .map(|i| SURROGATE_FIRST_NM + SURROGATE_STEP_NM * i as f64)
            .collect();
        let sigma = wavelengths
            .iter()
            .map(|&l| {
                let e = photon_energy_ev(l);
                if e <= DEFAULT_CUTOFF_EV {
                    0.0
                } else {
                    let u = (e - DEFAULT_CUTOFF_EV) / DEFAULT_CUTOFF_EV;
                    scale_m2 * (u.powi(SURROGATE_LOW_EXPONENT) + SURROGATE_UV_WEIGHT * u.powi(SURROGATE_UV_EXPONENT))
                }
            })
            .collect();
        Self::new(wavelengths, sigma, DEFAULT_CUTOFF_EV).expect("surrogate table is valid")
    }

    pub fn from_reader<R: BufRead>(reader: R, origin: &str, cutoff_ev: f64) -> Result<Self> {
        let mut wl = Vec::new();
        let mut sig = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(format!("reading {origin}"), e))?;
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                path: origin.to_string(),
                line: idx + 1,
                message,
            };
            let cols: Vec<&str> = body
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            if cols.len() != 2 {
                return Err(parse_err(format!("expected 2 columns, found {}", cols.len())));
            }
            let l: f64 = cols[0]
                .parse()
                .map_err(|_| parse_err(format!("bad wavelength `{}`", cols[0])))?;
            let s: f64 = cols[1]
                .parse()
                .map_err(|_| parse_err(format!("bad cross-section `{}`", cols[1])))?;
            if let Some(&prev) = wl.last() {
                if l <= prev {
                    return Err(parse_err(format!("wavelength {l} does not increase (previous {prev})")));
                }
            }
            wl.push(l);
            sig.push(s);
        }
        Self::new(wl, sig, cutoff_ev)
    }

    pub fn from_path(path: &Path, cutoff_ev: f64) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io_path("open", path, e))?;
        Self::from_reader(std::io::BufReader::new(file), &path.display().to_string(), cutoff_ev)
    }

    /// Writes the table in the same two-column format it is read from.
    pub fn write_to<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# wavelength_nm sigma_m2 (cutoff {} eV)", self.cutoff_ev)?;
        for (l, s) in self.wavelengths_nm.iter().zip(&self.sigma_m2) {
            writeln!(w, "{l} {s:e}")?;
        }
        Ok(())
    }

    pub fn wavelengths_nm(&self) -> &[f64] {
        &self.wavelengths_nm
    }

    pub fn sigma_m2(&self) -> &[f64] {
        &self.sigma_m2
    }

    pub fn cutoff_ev(&self) -> f64 {
        self.cutoff_ev
    }

    pub fn cutoff_wavelength_nm(&self) -> f64 {
        wavelength_nm_from_energy_ev(self.cutoff_ev)
    }

    /// Wavelength interval over which emission can occur: the table range
    /// clipped at the cutoff. Empty (`lo >= hi`) if the whole table lies
    /// below the cutoff energy.
    pub fn support_nm(&self) -> (f64, f64) {
        let lo = self.wavelengths_nm[0];
        let hi = self.wavelengths_nm[self.wavelengths_nm.len() - 1].min(self.cutoff_wavelength_nm());
        (lo, hi)
    }

    /// Panel boundaries for quadrature over the support: every tabulated
    /// wavelength inside it plus the support edges.
    pub fn breakpoints_nm(&self) -> Vec<f64> {
        let (lo, hi) = self.support_nm();
        if lo >= hi {
            return Vec::new();
        }
        let mut b = vec![lo];
        b.extend(self.wavelengths_nm.iter().copied().filter(|&l| l > lo && l < hi));
        b.push(hi);
        b
    }

    /// σ_abs at `lambda_nm`, in m². Zero below the cutoff energy and beyond
    /// the long-wavelength end of the table; short-wavelength queries clamp
    /// to the first entry. Between grid points ln σ is interpolated linearly
    /// in λ, falling back to linear interpolation next to a zero entry.
    pub fn sigma_at(&self, lambda_nm: f64) -> f64 {
        if !(lambda_nm > 0.0) || photon_energy_ev(lambda_nm) < self.cutoff_ev {
            return 0.0;
        }
        let wl = &self.wavelengths_nm;
        let n = wl.len();
        if lambda_nm <= wl[0] {
            return self.sigma_m2[0];
        }
        if lambda_nm > wl[n - 1] {
            return 0.0;
        }
        let i = wl.partition_point(|&x| x < lambda_nm).clamp(1, n - 1);
        let (x0, x1) = (wl[i - 1], wl[i]);
        let (s0, s1) = (self.sigma_m2[i - 1], self.sigma_m2[i]);
        let f = (lambda_nm - x0) / (x1 - x0);
        if s0 > 0.0 && s1 > 0.0 {
            (s0.ln() + f * (s1.ln() - s0.ln())).exp()
        } else {
            s0 + f * (s1 - s0)
        }
    }

    /// Returns a copy with every σ multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.wavelengths_nm.clone(),
            self.sigma_m2.iter().map(|s| s * factor).collect(),
            self.cutoff_ev,
        )
    }
}

impl Default for CrossSectionTable {
    fn default() -> Self {
        Self::default_surrogate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_below_cutoff() {
        let t = CrossSectionTable::default_surrogate();
        assert_eq!(t.sigma_at(900.0), 0.0);
        assert_eq!(t.sigma_at(t.cutoff_wavelength_nm() + 0.01), 0.0);
        assert!(t.sigma_at(600.0) > 0.0);
    }

    #[test]
    fn clamps_short_wavelengths() {
        let t = CrossSectionTable::default_surrogate();
        assert_eq!(t.sigma_at(50.0), t.sigma_m2()[0]);
    }

    #[test]
    fn interpolation_hits_grid_points() {
        let t = CrossSectionTable::default_surrogate();
        for (l, s) in t.wavelengths_nm().iter().zip(t.sigma_m2()) {
            if photon_energy_ev(*l) >= t.cutoff_ev() {
                assert!((t.sigma_at(*l) - s).abs() <= 1e-12 * s.abs());
            }
        }
    }

    #[test]
    fn log_linear_between_points() {
        let t = CrossSectionTable::new(vec![400.0, 500.0], vec![1e-20, 4e-20], 1.0).unwrap();
        assert!((t.sigma_at(450.0) - 2e-20).abs() < 1e-32);
    }

    #[test]
    fn parses_text_format() {
        let text = "# comment\n400 1e-20\n\n500, 2e-20 # trailing\n600 0\n";
        let t = CrossSectionTable::from_reader(text.as_bytes(), "inline", 1.5).unwrap();
        assert_eq!(t.wavelengths_nm(), &[400.0, 500.0, 600.0]);
        assert_eq!(t.sigma_m2()[1], 2e-20);
    }

    #[test]
    fn rejects_non_increasing_rows() {
        let err = CrossSectionTable::from_reader("400 1\n400 2\n".as_bytes(), "x", 1.5).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        assert!(CrossSectionTable::from_reader("400 -1\n500 2\n".as_bytes(), "x", 1.5).is_err());
        assert!(CrossSectionTable::from_reader("400\n".as_bytes(), "x", 1.5).is_err());
    }

    #[test]
    fn support_is_clipped_at_cutoff() {
        let t = CrossSectionTable::default_surrogate();
        let (lo, hi) = t.support_nm();
        assert_eq!(lo, 200.0);
        assert!((hi - 826.56).abs() < 0.01, "{hi}");
        let b = t.breakpoints_nm();
        assert_eq!(b[0], lo);
        assert_eq!(*b.last().unwrap(), hi);
    }

    #[test]
    fn calibrated_scale_reproduces_visible_anchor() {
        use crate::physics::{EmissionModel, HeatCapacity};
        let m = EmissionModel::new(CrossSectionTable::default_surrogate(), HeatCapacity::default()).unwrap();
        let transit = 2.0 * 0.38 / 190.0;
        let n = m.band_rate(2500.0) * transit;
        assert!((n - 3.0).abs() < 1e-3, "{n}");
    }

    #[test]
    fn write_then_read_back() {
        let t = CrossSectionTable::default_surrogate();
        let mut buf = Vec::new();
        t.write_to(&mut buf).unwrap();
        let back = CrossSectionTable::from_reader(buf.as_slice(), "buf", t.cutoff_ev()).unwrap();
        for (a, b) in t.sigma_m2().iter().zip(back.sigma_m2()) {
            assert!((a - b).abs() <= 1e-15 * a.abs());
        }
    }
}
