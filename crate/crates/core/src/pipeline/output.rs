use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::heating::HeatingFit;
use crate::pipeline::run::{FringeScan, ResultTable, SpectrumCurve};

/// `<dir>/<scenario>_<subject>.csv`
pub fn output_path(dir: &Path, scenario: &str, subject: &str) -> PathBuf {
    dir.join(format!("{scenario}_{subject}.csv"))
}

fn num(x: f64) -> String {
    format!("{x:.8e}")
}

fn write_rows<W: Write>(out: W, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let wrap = |e: csv::Error| Error::io("writing CSV", std::io::Error::other(e));
    w.write_record(header).map_err(wrap)?;
    for r in rows {
        w.write_record(&r).map_err(wrap)?;
    }
    w.flush().map_err(|e| Error::io("writing CSV", e))
}

pub fn write_results<W: Write>(table: &ResultTable, out: W) -> Result<()> {
    write_rows(
        out,
        &[
            "power_w",
            "mean_entry_temperature_k",
            "max_stage_temperature_k",
            "visibility",
            "visibility_stderr",
            "baseline_visibility",
            "relative_count_rate",
            "mean_visible_photons",
        ],
        table.rows.iter().map(|r| {
            vec![
                num(r.power_w),
                num(r.mean_entry_temperature_k),
                num(r.max_stage_temperature_k),
                num(r.visibility),
                num(r.visibility_stderr),
                num(r.baseline_visibility),
                num(r.relative_count_rate),
                num(r.mean_visible_photons),
            ]
        }),
    )
}

pub fn write_spectrum<W: Write>(curves: &[SpectrumCurve], out: W) -> Result<()> {
    write_rows(
        out,
        &["temperature_k", "lambda_nm", "r_lambda_per_s_nm"],
        curves.iter().flat_map(|c| {
            c.lambda_nm
                .iter()
                .zip(&c.rate_per_nm)
                .map(move |(l, r)| vec![num(c.temperature_k), num(*l), num(*r)])
        }),
    )
}

pub fn write_scans<W: Write>(scans: &[FringeScan], out: W) -> Result<()> {
    write_rows(
        out,
        &["power_w", "x_nm", "counts"],
        scans.iter().flat_map(|s| {
            s.x_nm
                .iter()
                .zip(&s.counts)
                .map(move |(x, c)| vec![num(s.power_w), num(*x), num(*c)])
        }),
    )
}

pub fn write_fit<W: Write>(fit: &HeatingFit, out: W) -> Result<()> {
    write_rows(
        out,
        &[
            "triplet_sigma_cm2",
            "prefactor_per_s",
            "residual",
            "objective_evaluations",
        ],
        std::iter::once(vec![
            num(fit.sigma_cm2),
            num(fit.prefactor_per_s),
            num(fit.residual),
            fit.objective_evaluations.to_string(),
        ]),
    )
}

/// Creates `dir` if needed and writes through `f` into
/// `<dir>/<scenario>_<subject>.csv`.
pub fn write_file(
    dir: &Path,
    scenario: &str,
    subject: &str,
    f: impl FnOnce(std::io::BufWriter<std::fs::File>) -> Result<()>,
) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io_path("create", dir, e))?;
    let path = output_path(dir, scenario, subject);
    let file = std::fs::File::create(&path).map_err(|e| Error::io_path("create", &path, e))?;
    f(std::io::BufWriter::new(file))?;
    Ok(path)
}
