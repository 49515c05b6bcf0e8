//! Synthetic benchmark series with known components: a phase-jittered
//! square-wave season, a piecewise-constant trend with abrupt level changes,
//! isolated spikes and dips, and white Gaussian noise.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub period: usize,
    pub num_periods: usize,
    /// Half the peak-to-peak height of the square wave.
    pub seasonal_amplitude: f64,
    /// Each period is circularly shifted by an integer in `[-max_shift, max_shift]`.
    pub max_shift: usize,
    pub num_level_changes: usize,
    /// Magnitude range of a level change; the sign is random.
    pub level_change_range: (f64, f64),
    pub num_anomalies: usize,
    /// Magnitude range of a spike or dip; the sign is random.
    pub anomaly_range: (f64, f64),
    pub noise_variance: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            period: 50,
            num_periods: 15,
            seasonal_amplitude: 1.0,
            max_shift: 3,
            num_level_changes: 10,
            level_change_range: (1.0, 3.0),
            num_anomalies: 14,
            anomaly_range: (2.0, 5.0),
            noise_variance: 0.1,
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    pub fn len(&self) -> usize {
        self.period * self.num_periods
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        if self.period < 2 {
            return bad(format!("period must be at least 2, got {}", self.period));
        }
        if self.num_periods < 3 {
            return bad(format!(
                "need at least 3 periods, got {}",
                self.num_periods
            ));
        }
        if 4 * self.max_shift >= self.period {
            return bad(format!(
                "max_shift {} must be below period/4",
                self.max_shift
            ));
        }
        if !(self.noise_variance.is_finite() && self.noise_variance >= 0.0) {
            return bad(format!("noise variance {} is invalid", self.noise_variance));
        }
        if !(self.seasonal_amplitude.is_finite() && self.seasonal_amplitude >= 0.0) {
            return bad(format!("amplitude {} is invalid", self.seasonal_amplitude));
        }
        for (name, (lo, hi)) in [
            ("level change", self.level_change_range),
            ("anomaly", self.anomaly_range),
        ] {
            if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi) {
                return bad(format!("{name} range [{lo}, {hi}] is invalid"));
            }
        }
        let n = self.len();
        if self.num_level_changes + self.num_anomalies >= n {
            return bad(format!(
                "{} level changes and {} anomalies do not fit in {n} samples",
                self.num_level_changes, self.num_anomalies
            ));
        }
        // Isolated anomalies each block their neighbours.
        if self.num_level_changes + 3 * self.num_anomalies >= n {
            return bad(format!(
                "{} isolated anomalies do not fit in {n} samples",
                self.num_anomalies
            ));
        }
        Ok(())
    }
}

/// True components of a generated series.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub trend: Vec<f64>,
    pub seasonal: Vec<f64>,
    pub anomalies: Vec<f64>,
    pub noise: Vec<f64>,
}

impl GroundTruth {
    /// `trend + seasonal + anomalies + noise`, summed in that order.
    pub fn compose(&self) -> Vec<f64> {
        (0..self.trend.len())
            .map(|t| self.trend[t] + self.seasonal[t] + self.anomalies[t] + self.noise[t])
            .collect()
    }

    pub fn len(&self) -> usize {
        self.trend.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trend.is_empty()
    }
}

/// Zero-mean square wave: `+amplitude` for the first half of the period,
/// `-amplitude` for the second, and 0 at the midpoint when the period is odd.
pub fn square_wave_template(period: usize, amplitude: f64) -> Vec<f64> {
    let half = period / 2;
    (0..period)
        .map(|p| {
            if period % 2 == 1 && p == half {
                0.0
            } else if p < half {
                amplitude
            } else {
                -amplitude
            }
        })
        .collect()
}

fn signed_magnitude(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    let magnitude = if hi > lo { rng.random_range(lo..=hi) } else { lo };
    if rng.random_bool(0.5) {
        magnitude
    } else {
        -magnitude
    }
}

/// Generates a series and its components. Deterministic in `spec.seed`.
pub fn generate(spec: &SyntheticSpec) -> Result<(TimeSeries, GroundTruth)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (period, n) = (spec.period, spec.len());

    let template = square_wave_template(period, spec.seasonal_amplitude);
    let mut seasonal = Vec::with_capacity(n);
    for _ in 0..spec.num_periods {
        let shift = rng.random_range(-(spec.max_shift as i64)..=spec.max_shift as i64);
        for p in 0..period {
            let src = (p as i64 - shift).rem_euclid(period as i64) as usize;
            seasonal.push(template[src]);
        }
    }

    let mut change_points = BTreeSet::new();
    while change_points.len() < spec.num_level_changes {
        change_points.insert(rng.random_range(1..n));
    }
    let mut trend = vec![0.0; n];
    let mut level = 0.0;
    for (t, value) in trend.iter_mut().enumerate() {
        if change_points.contains(&t) {
            level += signed_magnitude(&mut rng, spec.level_change_range);
        }
        *value = level;
    }

    let mut anomaly_points = BTreeSet::new();
    while anomaly_points.len() < spec.num_anomalies {
        let t = rng.random_range(0..n);
        let adjacent = (t > 0 && anomaly_points.contains(&(t - 1))) || anomaly_points.contains(&(t + 1));
        if change_points.contains(&t) || anomaly_points.contains(&t) || adjacent {
            continue;
        }
        anomaly_points.insert(t);
    }
    let mut anomalies = vec![0.0; n];
    for &t in &anomaly_points {
        let mut a = signed_magnitude(&mut rng, spec.anomaly_range);
        while a == 0.0 {
            a = signed_magnitude(&mut rng, spec.anomaly_range);
            if spec.anomaly_range.1 == 0.0 {
                return Err(Error::InvalidSpec("anomaly magnitude range is [0, 0]".into()));
            }
        }
        anomalies[t] = a;
    }

    let noise = if spec.noise_variance > 0.0 {
        let normal = Normal::new(0.0, spec.noise_variance.sqrt()).expect("finite std dev");
        (0..n).map(|_| normal.sample(&mut rng)).collect()
    } else {
        vec![0.0; n]
    };

    let truth = GroundTruth {
        trend,
        seasonal,
        anomalies,
        noise,
    };
    let series = TimeSeries::new(truth.compose(), period)?;
    Ok((series, truth))
}
