//! Phase-space features: largest Lyapunov exponent (Rosenstein) and
//! correlation dimension (Grassberger-Procaccia).
//!
//! Both estimators work on a delay embedding of the window. Pairwise searches
//! are restricted to a strided subset of at most `max_points` embedded points;
//! trajectories are still followed at full resolution so the time unit stays
//! one sample.

use serde::{Deserialize, Serialize};

use super::basic::power_spectrum;
use crate::error::{Error, Result};

/// Upper bound on the automatically selected embedding lag.
pub const MAX_AUTO_LAG: usize = 10;

/// Delay embedding view over a scalar series; points are never materialized.
#[derive(Debug, Clone, Copy)]
struct Embedding<'a> {
    x: &'a [f64],
    dim: usize,
    lag: usize,
}

impl<'a> Embedding<'a> {
    fn new(x: &'a [f64], dim: usize, lag: usize) -> Result<Self> {
        if dim == 0 || lag == 0 {
            return Err(Error::input("embedding dimension and lag must be >= 1"));
        }
        let span = (dim - 1) * lag;
        if x.len() <= span {
            return Err(Error::input(format!(
                "{} samples are too few for a delay embedding of dimension {dim} and lag {lag}",
                x.len()
            )));
        }
        Ok(Self { x, dim, lag })
    }

    fn len(&self) -> usize {
        self.x.len() - (self.dim - 1) * self.lag
    }

    fn dist_sq(&self, i: usize, j: usize) -> f64 {
        (0..self.dim)
            .map(|d| {
                let diff = self.x[i + d * self.lag] - self.x[j + d * self.lag];
                diff * diff
            })
            .sum()
    }
}

/// Stride so that `0, s, 2s, ..` over `n` indices keeps at most `max_points`.
fn stride_for(n: usize, max_points: usize) -> usize {
    n.div_ceil(max_points.max(1)).max(1)
}

/// First local minimum of the sample autocorrelation, searched over lags
/// `1..=cap`; returns `cap` when the autocorrelation keeps decreasing.
pub fn first_autocorrelation_minimum(x: &[f64], cap: usize) -> usize {
    let cap = cap.max(1);
    let n = x.len();
    if n < 3 {
        return 1;
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    let var: f64 = x.iter().map(|v| (v - mean).powi(2)).sum();
    if var == 0.0 {
        return 1;
    }
    let acf = |lag: usize| -> f64 {
        if lag >= n {
            return 0.0;
        }
        (0..n - lag)
            .map(|i| (x[i] - mean) * (x[i + lag] - mean))
            .sum::<f64>()
            / var
    };
    let mut prev = acf(1);
    for lag in 1..cap {
        let next = acf(lag + 1);
        if next > prev {
            return lag;
        }
        prev = next;
    }
    cap
}

/// Mean period in samples: reciprocal of the power-weighted mean frequency (DC excluded).
pub fn mean_period(x: &[f64]) -> f64 {
    let n = x.len();
    if n < 4 {
        return 1.0;
    }
    let psd = power_spectrum(x);
    let (mut num, mut den) = (0.0, 0.0);
    for (k, p) in psd.iter().enumerate().skip(1) {
        num += k as f64 / n as f64 * p;
        den += p;
    }
    if den <= 0.0 || num <= 0.0 {
        return 1.0;
    }
    (den / num).max(1.0)
}

/// Ordinary least-squares slope of `y` against `x`.
pub(crate) fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LyapunovParams {
    pub embed_dim: usize,
    /// Embedding lag in samples; `None` picks the first autocorrelation minimum.
    pub embed_lag: Option<usize>,
    /// Temporal exclusion window for neighbor search; `None` uses the mean period.
    pub mean_period: Option<usize>,
    /// Length of the divergence curve, in samples.
    pub horizon: usize,
    /// Inclusive step range of the linear fit; `None` fits the first third of the curve.
    pub fit_range: Option<(usize, usize)>,
    pub max_points: usize,
}

impl Default for LyapunovParams {
    fn default() -> Self {
        Self {
            embed_dim: 5,
            embed_lag: None,
            mean_period: None,
            horizon: 30,
            fit_range: None,
            max_points: 2000,
        }
    }
}

/// Mean log divergence curve of nearest-neighbor pairs, `horizon + 1` entries.
pub fn divergence_curve(x: &[f64], params: &LyapunovParams) -> Result<Vec<f64>> {
    let lag = params
        .embed_lag
        .unwrap_or_else(|| first_autocorrelation_minimum(x, MAX_AUTO_LAG));
    let emb = Embedding::new(x, params.embed_dim, lag)?;
    let theiler = params
        .mean_period
        .unwrap_or_else(|| mean_period(x).round() as usize);
    let horizon = params.horizon;
    let m = emb.len();
    if m <= horizon + theiler + 2 {
        return Err(Error::input(format!(
            "{m} embedded points are too few for horizon {horizon} with exclusion window {theiler}"
        )));
    }
    let usable = m - horizon;
    let stride = stride_for(usable, params.max_points);
    let refs: Vec<usize> = (0..usable).step_by(stride).collect();

    let mut sums = vec![0.0; horizon + 1];
    let mut counts = vec![0usize; horizon + 1];
    for &i in &refs {
        let mut best: Option<(usize, f64)> = None;
        for &j in &refs {
            if i.abs_diff(j) <= theiler {
                continue;
            }
            let d = emb.dist_sq(i, j);
            if d > 0.0 && best.is_none_or(|(_, b)| d < b) {
                best = Some((j, d));
            }
        }
        let Some((j, _)) = best else { continue };
        for t in 0..=horizon {
            let d = emb.dist_sq(i + t, j + t);
            if d > 0.0 {
                sums[t] += 0.5 * d.ln();
                counts[t] += 1;
            }
        }
    }
    if counts.contains(&0) {
        return Err(Error::input("no nearest-neighbor pairs outside the exclusion window"));
    }
    Ok(sums.iter().zip(&counts).map(|(s, &c)| s / c as f64).collect())
}

/// Largest Lyapunov exponent per sample step (Rosenstein's method): slope of
/// the mean log divergence curve over the fit range.
pub fn largest_lyapunov(x: &[f64], params: &LyapunovParams) -> Result<f64> {
    let (lo, hi) = params.fit_range.unwrap_or((0, params.horizon / 3));
    if lo >= hi || hi > params.horizon {
        return Err(Error::input(format!(
            "fit range {lo}..={hi} is not inside the divergence horizon {}",
            params.horizon
        )));
    }
    let curve = divergence_curve(x, params)?;
    let steps: Vec<f64> = (lo..=hi).map(|t| t as f64).collect();
    Ok(ols_slope(&steps, &curve[lo..=hi]))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorrelationParams {
    pub embed_dim: usize,
    pub embed_lag: Option<usize>,
    /// Number of log-spaced radii between the 2nd and 98th distance percentiles.
    pub radii: usize,
    pub max_points: usize,
}

impl Default for CorrelationParams {
    fn default() -> Self {
        Self {
            embed_dim: 5,
            embed_lag: None,
            radii: 20,
            max_points: 2000,
        }
    }
}

/// Minimum run of grid points for a scaling region.
const MIN_SCALING_RUN: usize = 5;
/// Maximum relative spread of local slopes inside a scaling region.
const SLOPE_SPREAD: f64 = 0.2;

/// Sorted pairwise distances of the strided embedded points.
fn pairwise_distances(x: &[f64], params: &CorrelationParams) -> Result<Vec<f64>> {
    let lag = params
        .embed_lag
        .unwrap_or_else(|| first_autocorrelation_minimum(x, MAX_AUTO_LAG));
    let emb = Embedding::new(x, params.embed_dim, lag)?;
    let stride = stride_for(emb.len(), params.max_points);
    let pts: Vec<usize> = (0..emb.len()).step_by(stride).collect();
    if pts.len() < 2 {
        return Err(Error::input("correlation sum needs at least two embedded points"));
    }
    let mut d = Vec::with_capacity(pts.len() * (pts.len() - 1) / 2);
    for (a, &i) in pts.iter().enumerate() {
        for &j in &pts[a + 1..] {
            d.push(emb.dist_sq(i, j).sqrt());
        }
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Correlation sum `C(r)`: fraction of point pairs closer than or equal to `r`.
pub fn correlation_sums(x: &[f64], params: &CorrelationParams, radii: &[f64]) -> Result<Vec<f64>> {
    let d = pairwise_distances(x, params)?;
    let total = d.len() as f64;
    Ok(radii
        .iter()
        .map(|&r| d.partition_point(|&v| v <= r) as f64 / total)
        .collect())
}

/// Radius grid used by [`correlation_dimension`]; empty for a degenerate window.
pub fn radius_grid(sorted_distances: &[f64], count: usize) -> Vec<f64> {
    let Some(&max) = sorted_distances.last() else {
        return Vec::new();
    };
    if max <= 0.0 || count < 2 {
        return Vec::new();
    }
    let mut lo = percentile(sorted_distances, 0.02);
    if lo <= 0.0 {
        let first_pos = sorted_distances.partition_point(|&v| v <= 0.0);
        lo = sorted_distances[first_pos];
    }
    let hi = percentile(sorted_distances, 0.98);
    if hi <= lo {
        return Vec::new();
    }
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..count)
        .map(|g| (llo + (lhi - llo) * g as f64 / (count - 1) as f64).exp())
        .collect()
}

/// Longest run of at least [`MIN_SCALING_RUN`] grid points whose local slopes
/// stay within [`SLOPE_SPREAD`] of their mean; earliest run wins ties.
fn scaling_region(log_r: &[f64], log_c: &[f64]) -> Option<(usize, usize)> {
    let g = log_r.len();
    if g < MIN_SCALING_RUN {
        return None;
    }
    let slopes: Vec<f64> = (0..g - 1)
        .map(|k| (log_c[k + 1] - log_c[k]) / (log_r[k + 1] - log_r[k]))
        .collect();
    let mut best: Option<(usize, usize)> = None;
    for start in 0..g {
        for end in (start + MIN_SCALING_RUN - 1)..g {
            let s = &slopes[start..end];
            let mean = s.iter().sum::<f64>() / s.len() as f64;
            let (min, max) = s
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
            if !(mean > 0.0) || max - min > SLOPE_SPREAD * mean {
                continue;
            }
            if best.is_none_or(|(bs, be)| end - start > be - bs) {
                best = Some((start, end));
            }
        }
    }
    best
}

/// Grassberger-Procaccia correlation dimension: slope of `ln C(r)` against
/// `ln r` over the automatically chosen scaling region of the radius grid.
/// Falls back to the whole grid when no region qualifies. Degenerate windows
/// (all embedded points coincide) return 0.
pub fn correlation_dimension(x: &[f64], params: &CorrelationParams) -> Result<f64> {
    let d = pairwise_distances(x, params)?;
    let radii = radius_grid(&d, params.radii);
    if radii.is_empty() {
        return Ok(0.0);
    }
    let total = d.len() as f64;
    let log_r: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let log_c: Vec<f64> = radii
        .iter()
        .map(|&r| (d.partition_point(|&v| v <= r) as f64 / total).ln())
        .collect();
    let (lo, hi) = scaling_region(&log_r, &log_c).unwrap_or((0, log_r.len() - 1));
    Ok(ols_slope(&log_r[lo..=hi], &log_c[lo..=hi]).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn logistic(n: usize, x0: f64) -> Vec<f64> {
        let mut x = x0;
        (0..n)
            .map(|_| {
                x = 4.0 * x * (1.0 - x);
                x
            })
            .collect()
    }

    #[test]
    fn sinusoid_has_no_divergence() {
        let x: Vec<f64> = (0..2560).map(|i| (i as f64 * 0.1237).sin()).collect();
        let l = largest_lyapunov(&x, &LyapunovParams::default()).unwrap();
        assert!(l.abs() < 0.05, "{l}");
    }

    #[test]
    fn logistic_map_exponent_is_ln2() {
        let x = logistic(3000, 0.1234);
        let params = LyapunovParams {
            embed_dim: 2,
            embed_lag: Some(1),
            mean_period: Some(1),
            horizon: 12,
            fit_range: Some((0, 4)),
            ..Default::default()
        };
        let l = largest_lyapunov(&x, &params).unwrap();
        let ln2 = 2f64.ln();
        assert!((l - ln2).abs() < 0.15 * ln2, "{l}");
    }

    #[test]
    fn noise_diverges_faster_than_sinusoid() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let noise: Vec<f64> = (0..2560).map(|_| rng.random::<f64>() - 0.5).collect();
        let sine: Vec<f64> = (0..2560).map(|i| (i as f64 * 0.1237).sin()).collect();
        let p = LyapunovParams::default();
        let ln = largest_lyapunov(&noise, &p).unwrap();
        assert!(ln.is_finite() && ln > 0.0);
        assert!(ln > largest_lyapunov(&sine, &p).unwrap());
    }

    #[test]
    fn lyapunov_rejects_short_series() {
        assert!(largest_lyapunov(&[0.1; 20], &LyapunovParams::default()).is_err());
        let bad = LyapunovParams {
            fit_range: Some((5, 2)),
            ..Default::default()
        };
        assert!(largest_lyapunov(&logistic(500, 0.3), &bad).is_err());
    }

    #[test]
    fn ramp_has_dimension_one() {
        let x: Vec<f64> = (0..1000).map(|i| i as f64 / 1000.0).collect();
        let p = CorrelationParams {
            embed_dim: 2,
            embed_lag: Some(1),
            ..Default::default()
        };
        let d = correlation_dimension(&x, &p).unwrap();
        assert!((d - 1.0).abs() < 0.15, "{d}");
    }

    #[test]
    fn uniform_noise_fills_the_plane() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let x: Vec<f64> = (0..512).map(|_| rng.random::<f64>()).collect();
        let p = CorrelationParams {
            embed_dim: 2,
            embed_lag: Some(1),
            ..Default::default()
        };
        let d = correlation_dimension(&x, &p).unwrap();
        assert!((d - 2.0).abs() < 0.3, "{d}");
    }

    #[test]
    fn correlation_sums_match_pair_count() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let x: Vec<f64> = (0..300).map(|_| rng.random::<f64>()).collect();
        let p = CorrelationParams {
            embed_dim: 3,
            embed_lag: Some(2),
            ..Default::default()
        };
        let radii = [0.05, 0.2, 0.5, 0.9];
        let got = correlation_sums(&x, &p, &radii).unwrap();
        let pts: Vec<[f64; 3]> = (0..300 - 4).map(|i| [x[i], x[i + 2], x[i + 4]]).collect();
        for (r, c) in radii.iter().zip(got) {
            let mut hits = 0usize;
            let mut pairs = 0usize;
            for a in 0..pts.len() {
                for b in a + 1..pts.len() {
                    let d: f64 = (0..3).map(|k| (pts[a][k] - pts[b][k]).powi(2)).sum::<f64>().sqrt();
                    pairs += 1;
                    if d <= *r {
                        hits += 1;
                    }
                }
            }
            assert_eq!(c, hits as f64 / pairs as f64);
        }
    }

    #[test]
    fn constant_window_has_zero_dimension() {
        assert_eq!(correlation_dimension(&[0.7; 400], &CorrelationParams::default()).unwrap(), 0.0);
    }

    #[test]
    fn autocorrelation_lag_is_capped() {
        let slow: Vec<f64> = (0..2000).map(|i| (i as f64 * 0.001).sin()).collect();
        assert_eq!(first_autocorrelation_minimum(&slow, MAX_AUTO_LAG), MAX_AUTO_LAG);
        let alt: Vec<f64> = (0..200).map(|i| ((i as f64) * std::f64::consts::PI / 3.0).cos()).collect();
        assert_eq!(first_autocorrelation_minimum(&alt, MAX_AUTO_LAG), 3);
    }
}
