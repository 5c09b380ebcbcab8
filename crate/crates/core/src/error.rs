//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("truncation too small: tail mass {tail:.3e} beyond n_max = {n_max} exceeds budget {budget:.1e}")]
    Truncation { n_max: usize, tail: f64, budget: f64 },

    #[error("insufficient headroom: moment shift {needed} not supported above the occupied levels (n_max = {n_max})")]
    Headroom { needed: usize, n_max: usize },

    #[error("mean photon number is zero; rescaled fluctuation factor undefined")]
    ZeroMeanPhoton,

    #[error("rising product h({n}, {m}) overflows f64")]
    Overflow { n: usize, m: u32 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("step size too coarse: norm drift {drift:.3e} exceeds budget {budget:.1e}")]
    StepSize { drift: f64, budget: f64 },

    #[error("unknown observable `{0}`")]
    UnknownObservable(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
