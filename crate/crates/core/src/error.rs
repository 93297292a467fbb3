use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("element {element} does not belong to the group: {reason}")]
    InvalidElement { element: String, reason: String },

    #[error("exact mode unavailable: exponent {0}")]
    ExactUnavailable(u64),

    #[error("operation requires a finite group")]
    NeedFiniteGroup,

    #[error("operation requires a free group Z^d")]
    NeedFreeGroup,

    #[error("unsupported rank {0}: torus certification is implemented for d <= 2")]
    UnsupportedRank(usize),

    #[error("not a lattice point: {0}")]
    NotLatticePoint(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sigma is not strictly positive definite (transform minimum {0})")]
    NotStrictlyPositiveDefinite(String),

    #[error("0 is not in omega; the feasible set is empty")]
    ZeroNotInOmega,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("divergent pairing: {0}")]
    DivergentPairing(String),

    #[error("numeric failure in simplex: {0}")]
    NumericFailure(String),

    #[error("weak duality violated: dual value {dual} exceeds primal value {primal}")]
    WeakDualityViolated { primal: String, dual: String },

    #[error("mismatched problems: {0}")]
    Mismatch(String),

    #[error("solution not optimal: {0}")]
    NotOptimal(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
