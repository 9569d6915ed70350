use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("strategy `{0}` has no closed form; use quadrature")]
    NoClosedForm(String),

    #[error("ridge path needs lambda > 0 (got {0}); use the ridgeless path")]
    RequiresRidge(f64),

    #[error("phi = {phi} is within 1e-3 of the interpolation threshold p = {p}")]
    InterpolationThreshold { phi: f64, p: f64 },

    #[error("invalid prediction: nu0 = {nu0:e} does not exceed m0^2 = {m0_sq:e}", m0_sq = m0 * m0)]
    InvalidPrediction { m0: f64, nu0: f64 },

    #[error("fixed point did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("missing column(s): {}", .0.join(", "))]
    MissingColumns(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Short machine-readable code, used in the `error_code` CSV column.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::NoClosedForm(_) => "no_closed_form",
            Error::RequiresRidge(_) => "requires_ridge",
            Error::InterpolationThreshold { .. } => "interpolation_threshold",
            Error::InvalidPrediction { .. } => "invalid_prediction",
            Error::NoConvergence { .. } => "no_convergence",
            Error::Parse(_) => "parse",
            Error::MissingColumns(_) => "missing_columns",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
        }
    }

    /// Process exit status for the CLI: 1 usage, 2 numerical validity, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_) | Error::Parse(_) | Error::MissingColumns(_) => 1,
            Error::NoClosedForm(_)
            | Error::RequiresRidge(_)
            | Error::InterpolationThreshold { .. }
            | Error::InvalidPrediction { .. }
            | Error::NoConvergence { .. } => 2,
            Error::Io(_) | Error::Csv(_) => 3,
        }
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
