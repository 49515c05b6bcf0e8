//! Core value types: an observed series with its period, and the additive
//! decomposition produced for it.

use crate::error::{Error, Result};

/// An evenly sampled series `y_0..y_{N-1}` with a declared seasonal period.
///
/// Construction enforces `period >= 2`, `N >= 2 * period + 1` and that every
/// observation is finite. Indices are zero-based throughout the crate.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    period: usize,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>, period: usize) -> Result<Self> {
        if period < 2 {
            return Err(Error::PeriodTooShort { period });
        }
        let required = 2 * period + 1;
        if values.len() < required {
            return Err(Error::SeriesTooShort {
                len: values.len(),
                period,
                required,
            });
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteValue { index, value });
        }
        Ok(Self { values, period })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest absolute observation.
    pub fn max_abs(&self) -> f64 {
        max_abs(&self.values)
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// Trend, seasonal and remainder components aligned with the input series.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionResult {
    pub trend: Vec<f64>,
    pub seasonal: Vec<f64>,
    pub remainder: Vec<f64>,
    pub iterations_run: usize,
    pub converged: bool,
}

impl DecompositionResult {
    pub fn len(&self) -> usize {
        self.trend.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trend.is_empty()
    }

    /// `trend[t] + seasonal[t] + remainder[t]` for every `t`.
    pub fn reconstruct(&self) -> Vec<f64> {
        self.trend
            .iter()
            .zip(&self.seasonal)
            .zip(&self.remainder)
            .map(|((a, b), c)| a + b + c)
            .collect()
    }
}

pub(crate) fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// Mean of `values` over the first `period * floor(len / period)` samples.
pub(crate) fn whole_period_mean(values: &[f64], period: usize) -> f64 {
    let span = period * (values.len() / period);
    if span == 0 {
        return 0.0;
    }
    // Offsetting by the first value makes the mean of a constant exact.
    let base = values[0];
    base + values[..span].iter().map(|v| v - base).sum::<f64>() / span as f64
}
