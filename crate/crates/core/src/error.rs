use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch in {op}: {lhs:?} vs {rhs:?}")]
    Shape {
        op: &'static str,
        lhs: (usize, usize),
        rhs: (usize, usize),
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The requested parameters violate a proven existence bound.
    #[error("infeasible parameters: {bound} violated ({detail})")]
    Infeasible { bound: String, detail: String },

    /// Existence is an open problem for these parameters.
    #[error("unknown feasibility: {0}")]
    UnknownFeasibility(String),

    #[error("singular input: smallest singular value {smallest:e} vs largest {largest:e}")]
    Singular { smallest: f64, largest: f64 },

    #[error("numeric failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn shape(op: &'static str, lhs: (usize, usize), rhs: (usize, usize)) -> Error {
    Error::Shape { op, lhs, rhs }
}
