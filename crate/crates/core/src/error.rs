use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// `sum_k alpha_k |f(k)|^p` diverges.
    #[error("function is not in L_p: beta * p = {beta_p} must be < 1/2")]
    NotInLp { beta_p: f64 },

    #[error("series for A^n f does not converge: growth exponent {beta} must be < 1/2")]
    NotSummable { beta: f64 },

    #[error("resource limit exceeded: {what} requested {requested}, limit {limit}")]
    ResourceLimit {
        what: &'static str,
        requested: u64,
        limit: u64,
    },

    #[error("no admissible (n, j) pairs in the probe grid")]
    EmptyGrid,

    #[error("Monte Carlo estimate unreliable: E f(S_n) is infinite for beta = {beta} >= 1/2")]
    HeavyTailUnreliable { beta: f64 },

    #[error("{0} has no exact rational representation")]
    NotExact(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
