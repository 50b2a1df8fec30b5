use thiserror::Error;

/// Errors raised by the numeric routines and the command-line front end.
#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the domain of a function (e.g. `phi_inv(0)`).
    #[error("domain error: {0}")]
    Domain(String),

    /// An entry of a distribution is at or below the interior floor.
    #[error("boundary error: {0}")]
    Boundary(String),

    #[error("normalization error: weights sum to {sum}, expected 1")]
    Normalization { sum: f64 },

    #[error("index error: {0}")]
    Index(String),

    #[error("shape error: expected length {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    /// Invalid family chart (bad `u0` weights).
    #[error("chart error: {0}")]
    Chart(String),

    /// A vector is not in the tangent subspace of the chart.
    #[error("tangent error: residual {residual:e} exceeds tolerance")]
    Tangent { residual: f64 },

    /// A ratio such as `g` or `h` has a vanishing denominator.
    #[error("singular: {0}")]
    Singular(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable snake_case name of the variant, used in JSON error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Boundary(_) => "boundary",
            Error::Normalization { .. } => "normalization",
            Error::Index(_) => "index",
            Error::Shape { .. } => "shape",
            Error::Chart(_) => "chart",
            Error::Tangent { .. } => "tangent",
            Error::Singular(_) => "singular",
            Error::Parameter(_) => "parameter",
            Error::Usage(_) => "usage",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
