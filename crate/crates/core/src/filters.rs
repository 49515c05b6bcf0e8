//! Kernel-weighted smoothers: the edge-preserving bilateral denoiser and the
//! non-local seasonal filter.
//!
//! Both produce, for every output point, a convex combination of input
//! samples whose weights are the product of an index-distance Gaussian and a
//! value-distance Gaussian. Windows are clipped at the series edges and the
//! surviving weights renormalized.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Normalized weights over a set of sample positions.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedNeighborhood {
    pub indices: Vec<usize>,
    pub weights: Vec<f64>,
}

impl WeightedNeighborhood {
    /// `sum_j w_j * values[j]`.
    pub fn apply(&self, values: &[f64]) -> f64 {
        self.apply_relative(values, values[self.indices[0]])
    }

    /// `reference + sum_j w_j * (values[j] - reference)`: the same value for
    /// normalized weights, but exact when every `values[j]` equals `reference`.
    pub fn apply_relative(&self, values: &[f64], reference: f64) -> f64 {
        reference
            + self
                .indices
                .iter()
                .zip(&self.weights)
                .map(|(&j, &w)| w * (values[j] - reference))
                .sum::<f64>()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Builds normalized weights from `(j, index_center, value_reference)`
/// triples: `j` is weighted by its index distance to `index_center` and the
/// distance of `values[j]` to `value_reference`.
///
/// Falls back to index-only weights if every value kernel underflows.
fn normalize_pairs(
    pairs: impl Iterator<Item = (usize, usize, f64)> + Clone,
    values: &[f64],
    delta_d: f64,
    delta_i: f64,
) -> Result<WeightedNeighborhood> {
    let two_dd = 2.0 * delta_d * delta_d;
    let two_di = 2.0 * delta_i * delta_i;
    let mut indices = Vec::new();
    let mut weights = Vec::new();
    for (j, c, reference) in pairs.clone() {
        let dj = j as f64 - c as f64;
        let dv = values[j] - reference;
        indices.push(j);
        weights.push((-(dj * dj) / two_dd).exp() * (-(dv * dv) / two_di).exp());
    }
    if indices.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let mut total: f64 = weights.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        for (w, (j, c, _)) in weights.iter_mut().zip(pairs) {
            let dj = j as f64 - c as f64;
            *w = (-(dj * dj) / two_dd).exp();
        }
        total = weights.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            // Index kernel underflowed as well; only possible for absurd bandwidths.
            weights.iter_mut().for_each(|w| *w = 1.0);
            total = weights.len() as f64;
        }
    }
    weights.iter_mut().for_each(|w| *w /= total);
    Ok(WeightedNeighborhood { indices, weights })
}

/// Bilateral weights of `candidates` around `center`:
/// `w_j ∝ exp(-(j-center)^2 / 2δd^2) * exp(-(v_j - v_center)^2 / 2δi^2)`.
pub fn bilateral_weights(
    center: usize,
    candidates: &[usize],
    values: &[f64],
    delta_d: f64,
    delta_i: f64,
) -> Result<WeightedNeighborhood> {
    if candidates.is_empty() {
        return Err(Error::EmptyWindow);
    }
    for &j in candidates.iter().chain(std::iter::once(&center)) {
        if j >= values.len() {
            return Err(Error::IndexOutOfBounds {
                index: j,
                len: values.len(),
            });
        }
    }
    check_bandwidths(delta_d, delta_i)?;
    normalize_pairs(
        candidates.iter().map(|&j| (j, center, values[center])),
        values,
        delta_d,
        delta_i,
    )
}

/// Bilateral window `[t - half_window, t + half_window]` clipped to the series.
pub fn denoise_neighborhood(
    t: usize,
    values: &[f64],
    half_window: usize,
    delta_d: f64,
    delta_i: f64,
) -> Result<WeightedNeighborhood> {
    let lo = t.saturating_sub(half_window);
    let hi = (t + half_window).min(values.len() - 1);
    normalize_pairs((lo..=hi).map(|j| (j, t, values[t])), values, delta_d, delta_i)
}

/// Edge-preserving smoothing of `values` with a bilateral filter.
///
/// With `half_window == 0` the output equals the input exactly.
pub fn denoise(values: &[f64], half_window: usize, delta_d: f64, delta_i: f64) -> Result<Vec<f64>> {
    check_bandwidths(delta_d, delta_i)?;
    if half_window == 0 || values.is_empty() {
        return Ok(values.to_vec());
    }
    (0..values.len())
        .into_par_iter()
        .map(|t| {
            denoise_neighborhood(t, values, half_window, delta_d, delta_i)
                .map(|n| n.apply_relative(values, values[t]))
        })
        .collect()
}

/// Parameters of the non-local seasonal filter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeasonalFilter {
    pub period: usize,
    /// Number of neighbouring periods (K).
    pub periods: usize,
    /// Half-width of each neighbourhood (H).
    pub half_window: usize,
    pub delta_d: f64,
    pub delta_i: f64,
    /// The current value is clamped into the neighbourhood's value range
    /// with this many extremes dropped from each end before it is used as
    /// the value-kernel reference.
    pub reference_trim: usize,
}

impl SeasonalFilter {
    /// Same-phase anchors `t - k*period` for `k = 1..=K` that fall inside the
    /// series; when none exist (first period) the future anchors
    /// `t + k*period` are used instead.
    pub fn anchors(&self, t: usize, len: usize) -> Vec<usize> {
        let past: Vec<usize> = (1..=self.periods)
            .filter_map(|k| t.checked_sub(k * self.period))
            .collect();
        if !past.is_empty() {
            return past;
        }
        (1..=self.periods)
            .map(|k| t + k * self.period)
            .filter(|&a| a < len)
            .collect()
    }

    /// Weights of every `(anchor, j)` pair with `j` within `half_window` of
    /// its anchor. The index kernel measures `j` against its anchor, the
    /// value kernel measures `values[j]` against the current value, so the
    /// filter picks the same-phase samples that look most like the current
    /// point and follows small phase shifts between periods.
    ///
    /// The current value is first clamped into the trimmed range of the
    /// neighbourhood values; an anomaly at `t` then cannot select a matching
    /// anomaly in an earlier period.
    pub fn neighborhood(&self, t: usize, values: &[f64]) -> Result<WeightedNeighborhood> {
        let len = values.len();
        let anchors = self.anchors(t, len);
        if anchors.is_empty() {
            return Err(Error::NoValidNeighborhood { index: t });
        }
        let h = self.half_window;
        let windows = anchors.iter().flat_map(move |&a| {
            let lo = a.saturating_sub(h);
            let hi = (a + h).min(len - 1);
            (lo..=hi).map(move |j| (j, a))
        });
        let adjacent = [t.checked_sub(1), Some(t + 1).filter(|&j| j < len)];
        let reference = self.reference(
            values[t],
            windows
                .clone()
                .map(|(j, _)| values[j])
                .chain(adjacent.into_iter().flatten().map(|j| values[j])),
        );
        normalize_pairs(
            windows.map(|(j, a)| (j, a, reference)),
            values,
            self.delta_d,
            self.delta_i,
        )
    }

    fn reference(&self, current: f64, neighbours: impl Iterator<Item = f64>) -> f64 {
        let mut sorted: Vec<f64> = neighbours.collect();
        let n = sorted.len();
        if n <= 2 * self.reference_trim {
            return current;
        }
        sorted.sort_by(f64::total_cmp);
        current.clamp(sorted[self.reference_trim], sorted[n - 1 - self.reference_trim])
    }

    pub fn apply(&self, values: &[f64]) -> Result<Vec<f64>> {
        if self.period < 2 || 2 * self.half_window + 1 > self.period {
            return Err(Error::WindowExceedsPeriod {
                half_window: self.half_window,
                span: 2 * self.half_window + 1,
                period: self.period,
            });
        }
        if self.periods == 0 {
            return Err(Error::InvalidParameter {
                name: "season_neighborhood_periods",
                value: 0.0,
            });
        }
        check_bandwidths(self.delta_d, self.delta_i)?;
        (0..values.len())
            .into_par_iter()
            .map(|t| self.neighborhood(t, values).map(|n| n.apply(values)))
            .collect()
    }
}

fn check_bandwidths(delta_d: f64, delta_i: f64) -> Result<()> {
    for (name, value) in [("delta_d", delta_d), ("delta_i", delta_i)] {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::NonPositiveBandwidth { name, value });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn seasonal(period: usize, periods: usize, half_window: usize, dd: f64, di: f64) -> SeasonalFilter {
        SeasonalFilter {
            period,
            periods,
            half_window,
            delta_d: dd,
            delta_i: di,
            reference_trim: 1,
        }
    }

    #[test]
    fn single_point_window_has_unit_weight() {
        let n = bilateral_weights(2, &[2], &[3.0, 1.0, 4.0], 1.0, 1.0).unwrap();
        assert_eq!(n.weights, vec![1.0]);
    }

    #[test]
    fn empty_window_is_an_error() {
        assert!(matches!(
            bilateral_weights(0, &[], &[1.0], 1.0, 1.0),
            Err(Error::EmptyWindow)
        ));
    }

    #[test]
    fn constant_values_reduce_to_index_gaussian() {
        let values = [2.0; 7];
        let n = bilateral_weights(3, &[0, 1, 2, 3, 4, 5, 6], &values, 1e9, 1.0).unwrap();
        for w in &n.weights {
            assert!(close(*w, 1.0 / 7.0, 1e-15));
        }
    }

    #[test]
    fn three_point_hand_evaluation() {
        // values [0,1,0], centre = middle: neighbours at distance 1 in index
        // and 1 in value, so each carries e^{-1/2} * e^{-1/2} = e^{-1}.
        let n = bilateral_weights(1, &[0, 1, 2], &[0.0, 1.0, 0.0], 1.0, 1.0).unwrap();
        let e = (-1.0_f64).exp();
        let z = 1.0 + 2.0 * e;
        let expected = [e / z, 1.0 / z, e / z];
        for (w, x) in n.weights.iter().zip(expected) {
            assert!(close(*w, x, 1e-15), "{w} vs {x}");
        }
        // 0.5761168847658291 = 1 / (1 + 2/e), evaluated independently.
        assert!(close(n.weights[1], 0.576_116_884_765_829_1, 1e-15));
    }

    #[test]
    fn centre_gets_largest_weight() {
        let values = [0.3, -1.2, 0.7, 2.5, 0.1];
        let n = bilateral_weights(2, &[0, 1, 2, 3, 4], &values, 1.5, 0.8).unwrap();
        let centre = n.weights[2];
        assert!(n.weights.iter().enumerate().all(|(i, &w)| i == 2 || w < centre));
    }

    #[test]
    fn zero_half_window_is_identity() {
        let values = vec![1.0, -3.0, 2.5, 7.0];
        assert_eq!(denoise(&values, 0, 1.0, 1.0).unwrap(), values);
    }

    #[test]
    fn denoise_keeps_constants() {
        let values = vec![4.25; 20];
        for h in [1, 3, 10, 50] {
            let out = denoise(&values, h, 1.3, 0.2).unwrap();
            assert!(out.iter().all(|v| close(*v, 4.25, 1e-12)));
        }
    }

    #[test]
    fn step_edge_is_preserved() {
        // Oracle: scalar evaluation of the bilateral sum per point.
        let values = [0.0, 0.0, 0.0, 10.0, 10.0, 10.0];
        let (h, dd, di) = (2usize, 2.0, 1.0);
        let out = denoise(&values, h, dd, di).unwrap();
        for t in 0..values.len() {
            let lo = t.saturating_sub(h);
            let hi = (t + h).min(values.len() - 1);
            let mut num = 0.0;
            let mut den = 0.0;
            for j in lo..=hi {
                let d = j as f64 - t as f64;
                let v = values[j] - values[t];
                let w = (-d * d / (2.0 * dd * dd)).exp() * (-v * v / (2.0 * di * di)).exp();
                num += w * values[j];
                den += w;
            }
            assert!(close(out[t], num / den, 1e-12));
            assert!(close(out[t], values[t], 0.1));
        }
    }

    #[test]
    fn seasonal_filter_reproduces_periodic_signal_with_tiny_index_bandwidth() {
        let period = 6;
        let pattern = [1.0, 2.0, -1.0, 0.5, -2.0, -0.5];
        let values: Vec<f64> = (0..5 * period).map(|t| pattern[t % period]).collect();
        let out = seasonal(period, 2, 2, 1e-6, 1.0).apply(&values).unwrap();
        for t in 0..values.len() {
            assert!(close(out[t], values[t], 1e-12), "t={t}");
        }
    }

    #[test]
    fn seasonal_filter_keeps_constants() {
        let values = vec![-1.5; 40];
        let out = seasonal(8, 3, 3, 2.0, 0.5).apply(&values).unwrap();
        assert!(out.iter().all(|v| close(*v, -1.5, 1e-12)));
    }

    #[test]
    fn first_period_uses_future_anchors() {
        let f = seasonal(10, 2, 2, 1.0, 1.0);
        assert_eq!(f.anchors(3, 35), vec![13, 23]);
        assert_eq!(f.anchors(13, 35), vec![3]);
        assert_eq!(f.anchors(27, 35), vec![17, 7]);
        // Only one future period fits.
        assert_eq!(f.anchors(5, 21), vec![15]);
    }

    /// Direct evaluation of the seasonal filter at `t` over the enumerated
    /// set of (anchor, neighbour) pairs, past anchors only.
    fn brute_force_season(values: &[f64], t: usize, f: &SeasonalFilter) -> f64 {
        let mut pool = Vec::new();
        for k in 1..=f.periods {
            let a = t - k * f.period;
            pool.extend_from_slice(&values[a - f.half_window..=a + f.half_window]);
        }
        // Trimmed range by repeated removal of the current min and max.
        for _ in 0..f.reference_trim {
            let lo = pool.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = pool.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            pool.remove(pool.iter().position(|&v| v == lo).unwrap());
            pool.remove(pool.iter().position(|&v| v == hi).unwrap());
        }
        let lo = pool.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = pool.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let reference = values[t].max(lo).min(hi);
        let (mut num, mut den) = (0.0, 0.0);
        for k in 1..=f.periods {
            let a = t - k * f.period;
            for j in a - f.half_window..=a + f.half_window {
                let d = j as f64 - a as f64;
                let v = values[j] - reference;
                let w = (-d * d / (2.0 * f.delta_d * f.delta_d)).exp()
                    * (-v * v / (2.0 * f.delta_i * f.delta_i)).exp();
                num += w * values[j];
                den += w;
            }
        }
        num / den
    }

    fn square(period: usize, len: usize) -> Vec<f64> {
        (0..len)
            .map(|t| if t % period < period / 2 { 1.0 } else { -1.0 })
            .collect()
    }

    const SPIKE_FILTER: SeasonalFilter = SeasonalFilter {
        period: 10,
        periods: 2,
        half_window: 2,
        delta_d: 1.0,
        delta_i: 0.5,
        reference_trim: 1,
    };

    #[test]
    fn spike_at_a_neighbour_is_suppressed() {
        let f = SPIKE_FILTER;
        let clean = square(f.period, 40);
        let mut spiked = clean.clone();
        let t = 22;
        spiked[t - f.period + 1] += 10.0;
        let base = f.neighborhood(t, &clean).unwrap().apply(&clean);
        let out = f.neighborhood(t, &spiked).unwrap().apply(&spiked);
        assert!(close(out, brute_force_season(&spiked, t, &f), 1e-12));
        assert!(close(out, clean[t], 0.5));
        assert!((out - base).abs() < 0.01 * 10.0);
    }

    #[test]
    fn spike_at_the_aligned_anchor_is_suppressed() {
        let f = SPIKE_FILTER;
        let clean = square(f.period, 40);
        for t in [24, 27, 33, 36] {
            let mut spiked = clean.clone();
            spiked[t - f.period] += 10.0;
            let out = f.neighborhood(t, &spiked).unwrap().apply(&spiked);
            assert!(close(out, brute_force_season(&spiked, t, &f), 1e-12));
            assert!(close(out, clean[t], 0.5), "t={t} out={out}");
            let base = f.neighborhood(t, &clean).unwrap().apply(&clean);
            assert!((out - base).abs() < 0.01 * 10.0);
        }
    }

    #[test]
    fn spike_at_t_does_not_copy_an_earlier_spike() {
        let f = SPIKE_FILTER;
        let clean = square(f.period, 40);
        let t = 31;
        let mut spiked = clean.clone();
        spiked[t] += 4.0;
        spiked[t - f.period - 1] += 4.0;
        let out = f.neighborhood(t, &spiked).unwrap().apply(&spiked);
        assert!(close(out, brute_force_season(&spiked, t, &f), 1e-12));
        assert!(close(out, clean[t], 0.1), "out={out}");

        let untrimmed = SeasonalFilter { reference_trim: 0, ..f };
        let copied = untrimmed.neighborhood(t, &spiked).unwrap().apply(&spiked);
        assert!(copied > clean[t] + 2.0, "copied={copied}");
    }

    #[test]
    fn reference_is_clamped_into_trimmed_range() {
        let f = seasonal(4, 1, 1, 1.0, 1.0);
        assert_eq!(f.reference(9.0, [1.0, 5.0, 3.0].into_iter()), 3.0);
        assert_eq!(f.reference(-9.0, [1.0, 5.0, 3.0].into_iter()), 3.0);
        assert_eq!(f.reference(2.0, [1.0, 5.0].into_iter()), 2.0);
        let g = SeasonalFilter { reference_trim: 0, ..f };
        assert_eq!(g.reference(9.0, [1.0, 5.0, 3.0].into_iter()), 5.0);
    }

    #[test]
    fn follows_a_phase_shift_smaller_than_the_window() {
        // Current period shifted right by 2 relative to the previous two.
        let period = 20;
        let mut values = square(period, 60);
        let shifted: Vec<f64> = (0..period).map(|p| values[(p + period - 2) % period]).collect();
        values[40..60].copy_from_slice(&shifted);
        let out = seasonal(period, 2, 4, 2.0, 0.3).apply(&values).unwrap();
        for t in 40..60 {
            assert!(close(out[t], values[t], 1e-3), "t={t}: {} vs {}", out[t], values[t]);
        }
    }

    #[test]
    fn rejects_window_spanning_a_period() {
        assert!(matches!(
            seasonal(6, 1, 3, 1.0, 1.0).apply(&[0.0; 30]),
            Err(Error::WindowExceedsPeriod { .. })
        ));
    }
}
