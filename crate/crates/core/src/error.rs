use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("bad reduction at v = {v}: {reason}")]
    BadPrime { v: u64, reason: String },

    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },

    #[error("point {0} does not lie on the curve")]
    NotOnCurve(String),

    #[error("curve is singular (discriminant 0)")]
    SingularCurve,
}

impl Error {
    pub(crate) fn parse(input: &str, reason: impl Into<String>) -> Self {
        Error::Parse {
            input: input.to_string(),
            reason: reason.into(),
        }
    }

    pub(crate) fn bad_prime(v: u64, reason: impl Into<String>) -> Self {
        Error::BadPrime {
            v,
            reason: reason.into(),
        }
    }
}
