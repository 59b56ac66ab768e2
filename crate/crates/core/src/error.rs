use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at offset {offset}: {message}")]
    SyntaxError { offset: usize, message: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("domain error: {0}")]
    DomainError(String),

    #[error("phi undefined at ({x}, {xi}): p1 = p2 = 0")]
    PoleError { x: f64, xi: f64 },
    #[error("eigenvalue crossing at ({x}, {xi}): |P| = 0")]
    CrossingError { x: f64, xi: f64 },
    #[error("symbol field `{field}` is not periodic with the declared period")]
    NotPeriodic { field: String },

    #[error("no level-set seed found for E = {energy}")]
    SeedNotFound { energy: f64 },
    #[error("curve did not close within {steps} steps")]
    NotClosed { steps: usize },
    #[error("degenerate gradient |dmu| = {norm:e} at ({x}, {xi})")]
    DegenerateGradient { x: f64, xi: f64, norm: f64 },
    #[error("eigenvalue crossing on the curve at ({x}, {xi})")]
    CrossingOnCurve { x: f64, xi: f64 },
    #[error("p1 = p2 = 0 on the curve at ({x}, {xi})")]
    PoleOnCurve { x: f64, xi: f64 },
    #[error("interior test and orientation disagree")]
    Inconsistent,

    #[error("phi unwrapping failed between adjacent samples")]
    UnwrapFailure,
    #[error("P is not confined to a plane along the curve (residual {residual:e})")]
    NotPlanar { residual: f64 },
    #[error("planar image curve passes through the origin")]
    OriginOnCurve,
    #[error("winding number not close to an integer (residual {residual})")]
    RoundingAmbiguous { residual: f64 },

    #[error("action is not monotone on the window near E = {energy}")]
    NonMonotone { energy: f64 },

    #[error("unsupported symbol: {0}")]
    UnsupportedSymbol(String),
    #[error("quantization plan too small: {0}")]
    PlanTooSmall(String),
    #[error("eigensolver did not converge")]
    ConvergenceFailure,

    #[error("eigenvalue pairing is ambiguous near E = {energy}")]
    MatchFailure { energy: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable error name, printed by the command line front end.
    pub fn name(&self) -> &'static str {
        match self {
            Error::SyntaxError { .. } => "SyntaxError",
            Error::UnknownIdentifier { .. } => "UnknownIdentifier",
            Error::DomainError(_) => "DomainError",
            Error::PoleError { .. } => "PoleError",
            Error::CrossingError { .. } => "CrossingError",
            Error::NotPeriodic { .. } => "NotPeriodic",
            Error::SeedNotFound { .. } => "SeedNotFound",
            Error::NotClosed { .. } => "NotClosed",
            Error::DegenerateGradient { .. } => "DegenerateGradient",
            Error::CrossingOnCurve { .. } => "CrossingOnCurve",
            Error::PoleOnCurve { .. } => "PoleOnCurve",
            Error::Inconsistent => "Inconsistent",
            Error::UnwrapFailure => "UnwrapFailure",
            Error::NotPlanar { .. } => "NotPlanar",
            Error::OriginOnCurve => "OriginOnCurve",
            Error::RoundingAmbiguous { .. } => "RoundingAmbiguous",
            Error::NonMonotone { .. } => "NonMonotone",
            Error::UnsupportedSymbol(_) => "UnsupportedSymbol",
            Error::PlanTooSmall(_) => "PlanTooSmall",
            Error::ConvergenceFailure => "ConvergenceFailure",
            Error::MatchFailure { .. } => "MatchFailure",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }

    /// True for errors caused by malformed input rather than numerics.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::SyntaxError { .. }
                | Error::UnknownIdentifier { .. }
                | Error::NotPeriodic { .. }
                | Error::UnsupportedSymbol(_)
                | Error::InvalidArgument(_)
        )
    }
}
