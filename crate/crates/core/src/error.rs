use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HausError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("grid resolution too coarse: {0}")]
    Resolution(String),

    #[error("aliasing: bandwidth {bandwidth} is not below the Nyquist frequency {nyquist}")]
    Aliasing { bandwidth: f64, nyquist: f64 },

    #[error("spectrum is not conjugate-symmetric (relative asymmetry {asymmetry:e})")]
    SymmetryViolation { asymmetry: f64 },

    #[error("quadrature did not converge: best estimate {estimate} with error {error:e} after {evaluations} evaluations")]
    ConvergenceFailure {
        estimate: f64,
        error: f64,
        evaluations: usize,
    },

    #[error("integral diverges near t = {near}")]
    Divergent { near: f64 },

    #[error("{what} is outside the tabulated range [{lo}, {hi}]")]
    OutOfRange { what: f64, lo: f64, hi: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("singular point: {0}")]
    Singular(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("rate undefined: {0}")]
    RateUndefined(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T, E = HausError> = std::result::Result<T, E>;

impl From<std::io::Error> for HausError {
    fn from(e: std::io::Error) -> Self {
        HausError::Io(e.to_string())
    }
}
