//! The full decomposition loop: denoise, extract the relative trend, filter
//! the seasonal component, adjust, then refine the trend on the remainder.

use crate::config::{validate_config, RobustStlConfig};
use crate::error::{Error, Result};
use crate::filters::{denoise, SeasonalFilter};
use crate::series::{max_abs, whole_period_mean, DecompositionResult, TimeSeries};
use crate::trend::extract_relative_trend;

/// Components after removing the seasonal mean into the trend level.
#[derive(Debug, Clone, PartialEq)]
pub struct Adjusted {
    pub trend: Vec<f64>,
    pub seasonal: Vec<f64>,
    pub remainder: Vec<f64>,
    /// Estimated trend level at `t = 0`: the mean of the raw seasonal
    /// estimate over whole periods.
    pub level: f64,
}

/// Shifts the mean of `raw_season` (over whole periods) into the trend and
/// defines the remainder as `y - seasonal - trend`.
pub fn adjust(
    relative_trend: &[f64],
    raw_season: &[f64],
    values: &[f64],
    period: usize,
) -> Result<Adjusted> {
    let n = values.len();
    for len in [relative_trend.len(), raw_season.len()] {
        if len != n {
            return Err(Error::LengthMismatch { left: n, right: len });
        }
    }
    let level = whole_period_mean(raw_season, period);
    let seasonal: Vec<f64> = raw_season.iter().map(|s| s - level).collect();
    let trend: Vec<f64> = relative_trend.iter().map(|r| r + level).collect();
    let remainder = values
        .iter()
        .zip(&seasonal)
        .zip(&trend)
        .map(|((y, s), t)| y - s - t)
        .collect();
    Ok(Adjusted {
        trend,
        seasonal,
        remainder,
        level,
    })
}

/// What happened in one pass of the outer loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub max_trend_change: f64,
    pub max_seasonal_change: f64,
    pub solver_objective: f64,
    pub level_estimate: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IterationDiagnostics {
    pub records: Vec<IterationRecord>,
}

impl IterationDiagnostics {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub result: DecompositionResult,
    pub diagnostics: IterationDiagnostics,
}

/// One pass of denoise → trend → season → adjust on `values`.
fn single_pass(values: &[f64], period: usize, config: &RobustStlConfig) -> Result<(Adjusted, f64)> {
    let denoised = denoise(
        values,
        config.denoise_half_window,
        config.denoise_delta_d,
        config.denoise_delta_i,
    )?;
    let trend = extract_relative_trend(
        &denoised,
        period,
        config.lambda1,
        config.lambda2,
        &config.solver,
    )?;
    let detrended = trend.detrend(&denoised);
    let raw_season = SeasonalFilter {
        period,
        periods: config.season_neighborhood_periods,
        half_window: config.season_half_window,
        delta_d: config.season_delta_d,
        delta_i: config.season_delta_i,
        reference_trim: config.season_reference_trim,
    }
    .apply(&detrended)?;
    let adjusted = adjust(&trend.relative, &raw_season, values, period)?;
    Ok((adjusted, trend.solution.objective))
}

/// Decomposes `series` into trend, seasonal and remainder.
///
/// The first pass decomposes the series itself. Every later pass decomposes
/// the current remainder and adds the resulting trend increment (slope
/// correction plus level) to the running trend; the seasonal increment of
/// those passes is dropped, because filtering a remainder that is mostly
/// noise only copies noise from earlier periods. The loop stops once the
/// trend moves by less than `outer_tolerance * (1 + max|y|)` everywhere, or
/// when `max_outer_iterations` passes have run (then `converged` is false).
/// The remainder is always `y - trend - seasonal`.
pub fn decompose(series: &TimeSeries, config: &RobustStlConfig) -> Result<Decomposition> {
    let config = validate_config(config, series)?;
    let period = series.period();
    let y = series.values();
    let n = y.len();
    let threshold = config.outer_tolerance * (1.0 + max_abs(y));

    let mut trend = vec![0.0; n];
    let mut seasonal = vec![0.0; n];
    let mut remainder = y.to_vec();
    let mut diagnostics = IterationDiagnostics::default();
    let mut converged = false;

    for pass in 0..config.max_outer_iterations {
        let (step, objective) = match single_pass(&remainder, period, &config) {
            Ok(v) => v,
            Err(Error::SolverDidNotConverge { best, .. }) => {
                return Err(Error::SolverDidNotConverge {
                    best,
                    diagnostics: Some(diagnostics),
                })
            }
            Err(e) => return Err(e),
        };
        let max_trend_change = max_abs(&step.trend);
        let max_seasonal_change = if pass == 0 {
            seasonal.copy_from_slice(&step.seasonal);
            max_abs(&step.seasonal)
        } else {
            0.0
        };
        for t in 0..n {
            trend[t] += step.trend[t];
            remainder[t] = y[t] - trend[t] - seasonal[t];
        }
        diagnostics.records.push(IterationRecord {
            max_trend_change,
            max_seasonal_change,
            solver_objective: objective,
            level_estimate: trend[0],
        });
        if max_trend_change.max(max_seasonal_change) < threshold {
            converged = true;
            break;
        }
    }

    Ok(Decomposition {
        result: DecompositionResult {
            trend,
            seasonal,
            remainder,
            iterations_run: diagnostics.len(),
            converged,
        },
        diagnostics,
    })
}
