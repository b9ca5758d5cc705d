use thiserror::Error;

/// Where a failing function evaluation happened.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Location {
    Point1D(f64),
    Point2D(f64, f64),
}

impl std::fmt::Display for Location {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Location::Point1D(t) => write!(f, "t = {t}"),
            Location::Point2D(x, y) => write!(f, "(x, y) = ({x}, {y})"),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// Degenerate or non-finite interval/rectangle, or a point outside it.
    #[error("domain error: {0}")]
    Domain(String),

    /// The integrand produced a non-finite value or failed to evaluate.
    #[error("evaluation error at {at}: {detail}")]
    Evaluation { at: Location, detail: String },

    /// A hypothesis of the requested bound does not hold (e.g. positivity).
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
