use alloc::string::String;
use alloc::vec::Vec;

/// Errors raised by grid construction, operators and solvers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("non-finite value at node {index} ({x}, {y})")]
    Sampling { index: usize, x: f64, y: f64 },
    #[error("translation component {h} is not a multiple of the spacing {spacing}")]
    Alignment { h: f64, spacing: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("tail integral diverges for exterior rule `{0}`")]
    Divergence(String),
    #[error("iteration limit reached after {iterations} iterations (gradient norm {residual:e})")]
    IterationLimit {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },
    #[error("grid spacing {spacing} exceeds step cap {h0}; need n >= {required_n}")]
    Resolution {
        spacing: f64,
        h0: f64,
        required_n: usize,
    },
    #[error("invalid test function: {0}")]
    InvalidTest(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Param(msg.into()))
}
