use thiserror::Error;

/// Failures raised by the physics and analysis layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dark state undefined: both Rabi frequencies vanish")]
    UndefinedDarkState,

    #[error("pattern undefined at two-photon resonance (delta = 0)")]
    UndefinedRatio,

    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },

    #[error("density matrix lost positivity at t = {t} (min eigenvalue {min_eigenvalue:e})")]
    PositivityLoss { t: f64, min_eigenvalue: f64 },

    #[error("eigen-solver did not converge: {0}")]
    EigenSolver(String),

    #[error("charge-basis truncation not converged: {0}")]
    Truncation(String),

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("out of domain: {0}")]
    OutOfDomain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// True for failures of the numerical machinery itself, as opposed to bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::StepUnderflow { .. }
                | Error::NonFinite { .. }
                | Error::PositivityLoss { .. }
                | Error::EigenSolver(_)
                | Error::Truncation(_)
                | Error::OutOfRange(_)
                | Error::OutOfDomain(_)
                | Error::UndefinedDarkState
                | Error::UndefinedRatio
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
