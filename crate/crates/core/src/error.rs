use thiserror::Error;

use crate::lad::LadSolution;
use crate::pipeline::IterationDiagnostics;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("period must be at least 2, got {period}")]
    PeriodTooShort { period: usize },

    #[error("series of length {len} is too short for period {period} (need at least {required})")]
    SeriesTooShort {
        len: usize,
        period: usize,
        required: usize,
    },

    #[error("seasonal window 2*{half_window}+1 = {span} exceeds period {period}")]
    WindowExceedsPeriod {
        half_window: usize,
        span: usize,
        period: usize,
    },

    #[error("{name} must be strictly positive and finite, got {value}")]
    NonPositiveBandwidth { name: &'static str, value: f64 },

    #[error("{name} must be non-negative and finite, got {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("value at index {index} is not finite ({value})")]
    NonFiniteValue { index: usize, value: f64 },

    #[error("filter window is empty")]
    EmptyWindow,

    #[error("index {index} is out of bounds for length {len}")]
    IndexOutOfBounds { index: usize, len: usize },

    #[error("no valid seasonal neighborhood for index {index}")]
    NoValidNeighborhood { index: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error(
        "l1 solver did not converge after {} iterations (best objective {})",
        best.iterations,
        best.objective
    )]
    SolverDidNotConverge {
        best: Box<LadSolution>,
        /// Outer-loop records gathered before the failure, when raised by the pipeline.
        diagnostics: Option<IterationDiagnostics>,
    },

    #[error("LP is unbounded")]
    Unbounded,

    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
}
