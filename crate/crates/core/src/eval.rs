//! Scoring against ground truth, and a classical moving-average baseline to
//! compare against.

use crate::error::{Error, Result};
use crate::series::{DecompositionResult, TimeSeries};
use crate::synth::GroundTruth;

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub trend_mse: f64,
    pub trend_mae: f64,
    pub season_mse: f64,
    pub season_mae: f64,
    /// `estimate - truth` per point.
    pub trend_error: Vec<f64>,
    pub season_error: Vec<f64>,
}

fn errors(estimate: &[f64], truth: &[f64]) -> Result<Vec<f64>> {
    if estimate.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: estimate.len(),
            right: truth.len(),
        });
    }
    Ok(estimate.iter().zip(truth).map(|(e, t)| e - t).collect())
}

fn mse(err: &[f64]) -> f64 {
    if err.is_empty() {
        return 0.0;
    }
    err.iter().map(|e| e * e).sum::<f64>() / err.len() as f64
}

fn mae(err: &[f64]) -> f64 {
    if err.is_empty() {
        return 0.0;
    }
    err.iter().map(|e| e.abs()).sum::<f64>() / err.len() as f64
}

/// MSE and MAE of estimated trend and season against the truth, over all points.
pub fn score_components(
    trend: &[f64],
    seasonal: &[f64],
    true_trend: &[f64],
    true_seasonal: &[f64],
) -> Result<MetricReport> {
    let trend_error = errors(trend, true_trend)?;
    let season_error = errors(seasonal, true_seasonal)?;
    if trend_error.len() != season_error.len() {
        return Err(Error::LengthMismatch {
            left: trend_error.len(),
            right: season_error.len(),
        });
    }
    Ok(MetricReport {
        trend_mse: mse(&trend_error),
        trend_mae: mae(&trend_error),
        season_mse: mse(&season_error),
        season_mae: mae(&season_error),
        trend_error,
        season_error,
    })
}

pub fn score(result: &DecompositionResult, truth: &GroundTruth) -> Result<MetricReport> {
    score_components(&result.trend, &result.seasonal, &truth.trend, &truth.seasonal)
}

/// Centered moving average of width `period` (a `2 x period` average when the
/// period is even). Near the edges the window is clipped and the remaining
/// weights renormalized.
pub fn centered_moving_average(values: &[f64], period: usize) -> Vec<f64> {
    let half = period / 2;
    let weight = |offset: usize| {
        if period.is_multiple_of(2) && offset == half {
            0.5
        } else {
            1.0
        }
    };
    let n = values.len();
    (0..n)
        .map(|t| {
            let lo = t.saturating_sub(half);
            let hi = (t + half).min(n - 1);
            let (mut num, mut den) = (0.0, 0.0);
            for (j, v) in values.iter().enumerate().take(hi + 1).skip(lo) {
                let w = weight(j.abs_diff(t));
                num += w * v;
                den += w;
            }
            num / den
        })
        .collect()
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let k = values.len();
    if k % 2 == 1 {
        values[k / 2]
    } else {
        0.5 * (values[k / 2 - 1] + values[k / 2])
    }
}

/// Classical additive decomposition: moving-average trend, per-phase median
/// of the detrended series as the (zero-mean) seasonal pattern.
pub fn classical_baseline(series: &TimeSeries) -> Result<DecompositionResult> {
    let (y, period) = (series.values(), series.period());
    if y.len() < 2 * period {
        return Err(Error::SeriesTooShort {
            len: y.len(),
            period,
            required: 2 * period,
        });
    }
    let trend = centered_moving_average(y, period);
    let detrended: Vec<f64> = y.iter().zip(&trend).map(|(a, b)| a - b).collect();
    let mut pattern: Vec<f64> = (0..period)
        .map(|p| {
            let mut phase: Vec<f64> = detrended.iter().skip(p).step_by(period).copied().collect();
            median(&mut phase)
        })
        .collect();
    let mean = pattern.iter().sum::<f64>() / period as f64;
    pattern.iter_mut().for_each(|p| *p -= mean);
    let seasonal: Vec<f64> = (0..y.len()).map(|t| pattern[t % period]).collect();
    let remainder = (0..y.len()).map(|t| y[t] - trend[t] - seasonal[t]).collect();
    Ok(DecompositionResult {
        trend,
        seasonal,
        remainder,
        iterations_run: 1,
        converged: true,
    })
}
