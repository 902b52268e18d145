use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("pole of {what} at {at}")]
    Pole { what: &'static str, at: String },
    #[error("series did not converge after {terms} terms")]
    NoConvergence { terms: usize },
    #[error("point {at} lies on a branch cut and carries no shore tag")]
    OnCut { at: String },
    #[error("point {at} is within {guard} of a singular endpoint")]
    NearEndpoint { at: String, guard: f64 },
    #[error("invalid argument: {0}")]
    Domain(String),
    #[error("linear system is numerically singular ({0})")]
    Singular(String),
}

pub type Result<T> = std::result::Result<T, Error>;
