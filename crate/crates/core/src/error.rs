use std::path::Path;

/// Errors produced anywhere in the simulator.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{path}:{line}: {message}")]
    Parse { path: String, line: usize, message: String },

    #[error("degenerate spectrum: total emission rate is zero at T = {temperature_k} K")]
    DegenerateSpectrum { temperature_k: f64 },

    #[error("quadrature did not reach tolerance (estimated error {estimate:e}, requested {requested:e})")]
    Quadrature { estimate: f64, requested: f64 },

    #[error("integrator step size underflow at t = {time:e} s (step {step:e} s)")]
    StepSizeUnderflow { time: f64, step: f64 },

    #[error("fit did not converge: {0}")]
    NonConvergence(String),

    #[error("ensemble is empty or carries zero detection weight")]
    EmptyEnsemble,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("scenario `{scenario}`: {source}")]
    Scenario {
        scenario: String,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }

    pub(crate) fn io_path(verb: &str, path: &Path, source: std::io::Error) -> Self {
        Error::io(format!("cannot {verb} {}", path.display()), source)
    }
}
