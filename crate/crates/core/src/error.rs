use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("polynomial {coeffs:?} is reducible over F_{p}")]
    Reducible { coeffs: Vec<u32>, p: u32 },
    #[error("invalid ring parameters: {0}")]
    InvalidRing(String),
    #[error("cannot parse ring spec `{0}` (expected zmod:p^r or ff:q^r)")]
    RingSpec(String),
    #[error("size overflow: {what} needs about {estimate} items (limit {limit})")]
    SizeOverflow {
        what: String,
        estimate: u128,
        limit: u128,
    },
    #[error("theorem violation: {0}")]
    Violation(String),
    #[error("eigensolver did not converge (best residual {residual:e})")]
    NonConvergence { residual: f64 },
    #[error("operator is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn overflow(what: impl Into<String>, estimate: u128, limit: u128) -> Error {
    Error::SizeOverflow {
        what: what.into(),
        estimate,
        limit,
    }
}
