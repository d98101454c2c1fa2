use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter lies outside the domain where the quantity is defined.
    #[error("{name} = {value} is outside its domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A closed-form bound was requested outside its range of validity.
    #[error("bound not valid here: {0}")]
    Validity(String),

    /// Circulant embedding produced a materially negative eigenvalue.
    #[error(
        "circulant embedding failed for n = {n}, H = {hurst}: min eigenvalue {min_eigenvalue:e} \
         (max {max_eigenvalue:e})"
    )]
    EmbeddingFailure {
        n: usize,
        hurst: f64,
        min_eigenvalue: f64,
        max_eigenvalue: f64,
    },

    #[error("covariance is not positive semidefinite: {0}")]
    NotPsd(String),

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("net construction failed: {0}")]
    Construction(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, domain: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            domain,
        }
    }
}
