//! Tunables for the decomposition and their validation against a series.

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Stopping controls for the l1 solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadSolverConfig {
    pub max_iterations: usize,
    /// Stop once the duality gap is below `rel_tolerance * objective`...
    pub rel_tolerance: f64,
    /// ...or below `abs_tolerance`.
    pub abs_tolerance: f64,
}

impl Default for LadSolverConfig {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            rel_tolerance: 1e-6,
            abs_tolerance: 1e-8,
        }
    }
}

impl LadSolverConfig {
    pub fn validate(&self) -> Result<()> {
        positive("solver.rel_tolerance", self.rel_tolerance)?;
        positive("solver.abs_tolerance", self.abs_tolerance)?;
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter {
                name: "solver.max_iterations",
                value: 0.0,
            });
        }
        Ok(())
    }
}

/// Every parameter of the decomposition.
///
/// Bandwidths are fixed values: `*_delta_d` in samples, `*_delta_i` in the
/// units of the series. The defaults suit series whose noise standard
/// deviation is a few tenths of a unit; rescale `*_delta_i` for other data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobustStlConfig {
    /// Penalty on first differences of the trend slope (level shifts).
    pub lambda1: f64,
    /// Penalty on second differences of the trend slope (kinks).
    pub lambda2: f64,
    pub denoise_half_window: usize,
    pub denoise_delta_d: f64,
    pub denoise_delta_i: f64,
    /// Number of neighbouring periods consulted by the seasonal filter.
    pub season_neighborhood_periods: usize,
    pub season_half_window: usize,
    pub season_delta_d: f64,
    pub season_delta_i: f64,
    /// Extremes dropped from each end of the neighbourhood values before the
    /// current value is clamped into their range.
    pub season_reference_trim: usize,
    pub max_outer_iterations: usize,
    /// Relative to `1 + max|y|`.
    pub outer_tolerance: f64,
    pub solver: LadSolverConfig,
}

impl Default for RobustStlConfig {
    fn default() -> Self {
        Self {
            lambda1: 10.0,
            lambda2: 0.5,
            denoise_half_window: 3,
            denoise_delta_d: 1.0,
            denoise_delta_i: 0.5,
            season_neighborhood_periods: 2,
            season_half_window: 5,
            season_delta_d: 2.0,
            season_delta_i: 0.5,
            season_reference_trim: 1,
            max_outer_iterations: 10,
            outer_tolerance: 1e-5,
            solver: LadSolverConfig::default(),
        }
    }
}

impl RobustStlConfig {
    /// Checks the parameters that do not depend on the series.
    pub fn validate_parameters(&self) -> Result<()> {
        non_negative("lambda1", self.lambda1)?;
        non_negative("lambda2", self.lambda2)?;
        positive("denoise_delta_d", self.denoise_delta_d)?;
        positive("denoise_delta_i", self.denoise_delta_i)?;
        positive("season_delta_d", self.season_delta_d)?;
        positive("season_delta_i", self.season_delta_i)?;
        positive("outer_tolerance", self.outer_tolerance)?;
        if self.season_neighborhood_periods == 0 {
            return Err(Error::InvalidParameter {
                name: "season_neighborhood_periods",
                value: 0.0,
            });
        }
        if self.max_outer_iterations == 0 {
            return Err(Error::InvalidParameter {
                name: "max_outer_iterations",
                value: 0.0,
            });
        }
        self.solver.validate()
    }
}

/// Returns `config` unchanged when it is usable for `series`.
pub fn validate_config(config: &RobustStlConfig, series: &TimeSeries) -> Result<RobustStlConfig> {
    check_dimensions(config, series.len(), series.period())?;
    Ok(*config)
}

/// Same checks as [`validate_config`] for a series known only by its shape.
pub fn check_dimensions(config: &RobustStlConfig, len: usize, period: usize) -> Result<()> {
    if period < 2 {
        return Err(Error::PeriodTooShort { period });
    }
    let required = 2 * period + 1;
    if len < required {
        return Err(Error::SeriesTooShort {
            len,
            period,
            required,
        });
    }
    let span = 2 * config.season_half_window + 1;
    if span > period {
        return Err(Error::WindowExceedsPeriod {
            half_window: config.season_half_window,
            span,
            period,
        });
    }
    config.validate_parameters()
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveBandwidth { name, value })
    }
}

fn non_negative(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, value })
    }
}
