use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use thermal_decoherence::heating::read_observations;
use thermal_decoherence::pipeline::{
    export_spectrum, fit_scenario, fringe_scan, run_scenario, write_file, write_fit, write_results, write_scans,
    write_spectrum, ExperimentConfig, Scenario, Simulator,
};
use thermal_decoherence::{Error, Result};

const THREADS_ENV: &str = "THERMDECO_THREADS";

/// Thermal-emission decoherence of laser-heated C70 in a Talbot-Lau
/// interferometer.
#[derive(Parser, Debug)]
#[command(name = "thermdeco", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Visibility sweep over the configured powers (fig3 writes spectra,
    /// fig2 adds fringe scans).
    Simulate(Common),
    /// Spectral emission rate R_lambda at the configured temperatures.
    Spectrum(Common),
    /// Fringe scans at the configured scan powers.
    Scan(Common),
    /// Fit triplet cross-section and ionization prefactor to ion yields.
    Fit {
        #[command(flatten)]
        common: Common,
        /// Rows of `power_W velocity_mps yield yield_err`.
        #[arg(long)]
        data: PathBuf,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// TOML experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// fig2, fig3, fig4a, fig4b or custom. Defaults to fig4a without a
    /// config file.
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; falls back to THERMDECO_THREADS, then all cores.
    #[arg(long)]
    threads: Option<usize>,
}

impl Common {
    fn config(&self) -> Result<ExperimentConfig> {
        let scenario = self.scenario.as_deref().map(str::parse::<Scenario>).transpose()?;
        let mut cfg = match (&self.config, scenario) {
            (Some(path), sc) => {
                let mut cfg = ExperimentConfig::from_path(path)?;
                if let Some(sc) = sc {
                    cfg.scenario = sc.name().to_string();
                }
                cfg
            }
            (None, Some(Scenario::Custom)) => {
                return Err(Error::Config("scenario `custom` needs --config".into()));
            }
            (None, sc) => ExperimentConfig::preset(sc.unwrap_or(Scenario::Fig4a))?,
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn threads(&self) -> Result<Option<usize>> {
        if let Some(n) = self.threads {
            return Ok(Some(n));
        }
        match std::env::var(THREADS_ENV) {
            Ok(s) if !s.trim().is_empty() => s
                .trim()
                .parse()
                .map(Some)
                .map_err(|_| Error::Config(format!("{THREADS_ENV} must be a thread count, got `{s}`"))),
            _ => Ok(None),
        }
    }
}

fn simulate(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let dir = &cfg.output_dir;
    let name = cfg.scenario.as_str();
    if name == Scenario::Fig3.name() {
        return spectrum(cfg);
    }
    let table = run_scenario(cfg)?;
    let mut written = vec![write_file(dir, name, "visibility", |w| write_results(&table, w))?];
    if name == Scenario::Fig2.name() {
        written.extend(scan(cfg)?);
    }
    Ok(written)
}

fn spectrum(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let curves = export_spectrum(&cfg.spectrum.temperatures_k, cfg)?;
    let path = write_file(&cfg.output_dir, &cfg.scenario, "spectrum", |w| {
        write_spectrum(&curves, w)
    })?;
    Ok(vec![path])
}

fn scan(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let sim = Simulator::new(cfg)?;
    let scans = cfg
        .scan
        .powers_w
        .iter()
        .map(|&p| fringe_scan(&sim, p))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::Scenario {
            scenario: cfg.scenario.clone(),
            source: Box::new(e),
        })?;
    let path = write_file(&cfg.output_dir, &cfg.scenario, "scan", |w| write_scans(&scans, w))?;
    Ok(vec![path])
}

fn fit(cfg: &ExperimentConfig, data: &Path) -> Result<Vec<PathBuf>> {
    let obs = read_observations(data)?;
    let result = fit_scenario(cfg, &obs)?;
    let path = write_file(&cfg.output_dir, &cfg.scenario, "fit", |w| write_fit(&result, w))?;
    Ok(vec![path])
}

fn run(cli: Cli) -> Result<Vec<PathBuf>> {
    let common = match &cli.command {
        Command::Simulate(c) | Command::Spectrum(c) | Command::Scan(c) => c,
        Command::Fit { common, .. } => common,
    };
    let cfg = common.config()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = common.threads()? {
        if n == 0 {
            return Err(Error::Config("thread count must be >= 1".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker threads: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Simulate(_) => simulate(&cfg),
        Command::Spectrum(_) => spectrum(&cfg),
        Command::Scan(_) => scan(&cfg),
        Command::Fit { data, .. } => fit(&cfg, data),
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("thermdeco: error: {e}");
            ExitCode::FAILURE
        }
    }
}
