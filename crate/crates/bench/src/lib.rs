//! Shared fixtures for the criterion benchmarks.

use robuststl::{generate, SyntheticSpec, TimeSeries};

/// The default synthetic benchmark series scaled to `num_periods` periods.
pub fn fixture(period: usize, num_periods: usize, seed: u64) -> TimeSeries {
    let spec = SyntheticSpec {
        period,
        num_periods,
        seed,
        ..Default::default()
    };
    generate(&spec).expect("valid fixture spec").0
}
