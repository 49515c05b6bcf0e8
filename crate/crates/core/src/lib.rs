//! Robust seasonal-trend decomposition of long, noisy time series.
//!
//! A series `y = trend + seasonal + remainder` is decomposed by
//!
//! 1. edge-preserving bilateral denoising ([`filters::denoise`]),
//! 2. a sparse least-absolute-deviations fit for the trend slope on the
//!    seasonally differenced series ([`trend::extract_relative_trend`]),
//! 3. non-local seasonal filtering of the detrended series
//!    ([`filters::SeasonalFilter`]),
//! 4. moving the seasonal mean into the trend level ([`pipeline::adjust`]),
//!
//! repeated on the remainder until the components stop moving
//! ([`pipeline::decompose`]). [`synth`] builds benchmark series with known
//! components and [`eval`] scores decompositions against them.

pub mod config;
pub mod error;
pub mod eval;
pub mod filters;
pub mod lad;
pub mod pipeline;
pub mod series;
pub mod synth;
pub mod trend;

pub use config::{check_dimensions, validate_config, LadSolverConfig, RobustStlConfig};
pub use error::{Error, Result};
pub use eval::{classical_baseline, score, MetricReport};
pub use lad::{lp_reference, solve_l1, LadSolution};
pub use pipeline::{adjust, decompose, Decomposition, IterationDiagnostics, IterationRecord};
pub use series::{DecompositionResult, TimeSeries};
pub use synth::{generate, GroundTruth, SyntheticSpec};
