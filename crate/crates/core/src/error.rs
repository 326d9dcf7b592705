use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("x = {x} is not a sample point of the tabulated couplings")]
    OffGrid { x: f64 },
    #[error("A+ vanishes (|A+| = {magnitude:e}) at x = {x}")]
    Singularity { x: f64, magnitude: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("no convergence: {0}")]
    Convergence(String),
    #[error("level n = {n} is not bound (requires n < s = {s})")]
    NoSuchBoundState { n: usize, s: f64 },
    #[error("non-finite value in {0}")]
    NonFinite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
