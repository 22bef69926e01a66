use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("quadratic character is undefined in characteristic 2")]
    EvenCharacteristic,
    #[error("GF({0}) is not a quadratic extension")]
    NotQuadraticExtension(u32),
    #[error("unsupported field: {0}")]
    UnsupportedField(String),
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid hypergraph: {0}")]
    InvalidHypergraph(String),
    #[error("graph is not regular")]
    NotRegular,
    #[error("eigenvalue iteration did not converge at index {0}")]
    NonConvergence(usize),
    #[error("eigenpair residual {residual:e} exceeds tolerance {tolerance:e}")]
    Residual { residual: f64, tolerance: f64 },
    #[error("enumeration budget exceeded after {partial} items (count is a lower bound only)")]
    EnumerationBudget { partial: u64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
