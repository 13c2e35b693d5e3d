use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("degenerate quadratic form: {0}")]
    DegenerateForm(String),

    #[error("class of degree {found} supplied where degree {expected} is required")]
    WrongDegree { expected: usize, found: usize },

    #[error("no sl2-triple: {0}")]
    NoSl2(String),

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    #[error("isotropic saturation failed: {0}")]
    Saturation(String),

    #[error("subspace is not stable under operator #{operator}: {detail}")]
    NotStable { operator: usize, detail: String },

    #[error("structure violation: {0}")]
    Structure(String),

    #[error("invalid period point: {0}")]
    Period(String),

    #[error("algebra file {location}: {message}")]
    Schema { location: String, message: String },

    #[error("algebra failed validation: {0}")]
    Validation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
