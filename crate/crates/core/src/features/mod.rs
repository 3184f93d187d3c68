//! Condition indicators extracted from fixed-length vibration windows.

mod basic;
mod chaos;
mod entropy;
pub mod table;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use basic::{rms, spectral_entropy};
pub use chaos::{
    correlation_dimension, correlation_sums, divergence_curve, first_autocorrelation_minimum,
    largest_lyapunov, mean_period, radius_grid, CorrelationParams, LyapunovParams, MAX_AUTO_LAG,
};
pub use entropy::approximate_entropy;
pub use table::FeatureTable;

use crate::error::{Error, Result};
use crate::rul::pul_ratio;

/// One sampling interval of acceleration data.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalWindow {
    samples: Vec<f64>,
    sample_rate: f64,
    /// 1-based ordinal of the window within its recording.
    pub index: usize,
    /// Seconds since the start of the run.
    pub timestamp: f64,
}

impl SignalWindow {
    pub fn new(samples: Vec<f64>, sample_rate: f64, index: usize, timestamp: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::input("signal window has no samples"));
        }
        if !(sample_rate > 0.0 && sample_rate.is_finite()) {
            return Err(Error::input(format!("sample rate must be positive, got {sample_rate}")));
        }
        if !timestamp.is_finite() {
            return Err(Error::input("window timestamp is not finite"));
        }
        if let Some(pos) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::input(format!("sample {pos} is not finite")));
        }
        Ok(Self {
            samples,
            sample_rate,
            index,
            timestamp,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }
}

/// One observation: feature values, elapsed time and (for training data) the
/// past-useful-life ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub tau: f64,
    pub rho: Option<f64>,
}

impl FeatureVector {
    pub fn new(values: Vec<f64>, tau: f64, rho: Option<f64>) -> Result<Self> {
        if let Some(r) = rho {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::input(format!("life ratio {r} is outside [0, 1]")));
            }
        }
        Ok(Self { values, tau, rho })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }
}

/// The supported condition indicators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Feature {
    Rms,
    Se,
    Ae,
    Lle,
    Cd,
    Diae,
}

impl Feature {
    pub const ALL: [Feature; 6] = [
        Feature::Rms,
        Feature::Se,
        Feature::Ae,
        Feature::Lle,
        Feature::Cd,
        Feature::Diae,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Feature::Rms => "rms",
            Feature::Se => "se",
            Feature::Ae => "ae",
            Feature::Lle => "lle",
            Feature::Cd => "cd",
            Feature::Diae => "diae",
        }
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Feature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        Feature::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(t))
            .ok_or_else(|| {
                Error::config(format!(
                    "unknown feature `{t}` (expected one of rms, se, ae, lle, cd, diae)"
                ))
            })
    }
}

/// Parses a comma-separated feature list such as `rms,se,diae`.
pub fn parse_feature_set(list: &str) -> Result<Vec<Feature>> {
    let set: Vec<Feature> = list
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect::<Result<_>>()?;
    validate_feature_set(&set)?;
    Ok(set)
}

fn validate_feature_set(set: &[Feature]) -> Result<()> {
    if set.is_empty() {
        return Err(Error::config("feature set is empty"));
    }
    for (i, f) in set.iter().enumerate() {
        if set[..i].contains(f) {
            return Err(Error::config(format!("feature `{f}` listed twice")));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureParams {
    /// Approximate entropy embedding dimension.
    pub ae_m: usize,
    /// Approximate entropy tolerance as a fraction of the window standard deviation.
    pub ae_r_tol: f64,
    pub lle: LyapunovParams,
    pub cd: CorrelationParams,
    /// Share of the earliest observations treated as the healthy baseline for DIAE.
    pub diae_baseline_fraction: f64,
}

impl Default for FeatureParams {
    fn default() -> Self {
        Self {
            ae_m: 2,
            ae_r_tol: 0.2,
            lle: LyapunovParams::default(),
            cd: CorrelationParams::default(),
            diae_baseline_fraction: 0.1,
        }
    }
}

impl FeatureParams {
    /// Healthy-baseline length for a series of `n` observations.
    pub fn baseline_len(&self, n: usize) -> usize {
        ((self.diae_baseline_fraction * n as f64).ceil() as usize).max(2)
    }
}

/// Degradation index of a feature series: absolute z-score against the
/// healthy baseline formed by the first `baseline_len` values.
///
/// The baseline spread is the sample standard deviation, clamped below by 1e-12.
pub fn degradation_index(series: &[f64], baseline_len: usize) -> Result<Vec<f64>> {
    if baseline_len < 2 {
        return Err(Error::input("degradation baseline needs at least 2 observations"));
    }
    if series.len() <= baseline_len {
        return Err(Error::input(format!(
            "series of length {} is not longer than the baseline ({baseline_len})",
            series.len()
        )));
    }
    let base = &series[..baseline_len];
    let n = baseline_len as f64;
    let mean = base.iter().sum::<f64>() / n;
    let var = base.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let sd = var.sqrt().max(1e-12);
    Ok(series.iter().map(|v| (v - mean).abs() / sd).collect())
}

/// Per-window scalar features (everything except DIAE, which needs the whole series).
fn window_features(samples: &[f64], wanted: &[Feature], params: &FeatureParams) -> Result<Vec<f64>> {
    wanted
        .iter()
        .map(|f| match f {
            Feature::Rms => rms(samples),
            Feature::Se => spectral_entropy(samples),
            Feature::Ae | Feature::Diae => approximate_entropy(samples, params.ae_m, params.ae_r_tol),
            Feature::Lle => largest_lyapunov(samples, &params.lle),
            Feature::Cd => correlation_dimension(samples, &params.cd),
        })
        .collect()
}

/// Incremental feature extraction: windows may be pushed in batches (so a
/// recording never has to be fully resident) and DIAE is resolved at the end.
#[derive(Debug)]
pub struct FeatureExtractor {
    feature_set: Vec<Feature>,
    params: FeatureParams,
    /// Per-window values in `feature_set` order; DIAE slots hold raw AE until `finish`.
    rows: Vec<Vec<f64>>,
    taus: Vec<f64>,
    indices: Vec<usize>,
}

impl FeatureExtractor {
    pub fn new(feature_set: Vec<Feature>, params: FeatureParams) -> Result<Self> {
        validate_feature_set(&feature_set)?;
        Ok(Self {
            feature_set,
            params,
            rows: Vec::new(),
            taus: Vec::new(),
            indices: Vec::new(),
        })
    }

    /// Computes features for a batch of windows in parallel; output order follows input order.
    pub fn push_batch(&mut self, windows: &[SignalWindow]) -> Result<()> {
        let mut last = self.taus.last().copied();
        for w in windows {
            if last.is_some_and(|t| w.timestamp <= t) {
                return Err(Error::input(format!(
                    "window {} timestamp {} does not increase",
                    w.index, w.timestamp
                )));
            }
            last = Some(w.timestamp);
        }
        let computed: Vec<Vec<f64>> = windows
            .par_iter()
            .map(|w| window_features(w.samples(), &self.feature_set, &self.params))
            .collect::<Result<_>>()?;
        self.rows.extend(computed);
        self.taus.extend(windows.iter().map(|w| w.timestamp));
        self.indices.extend(windows.iter().map(|w| w.index));
        Ok(())
    }

    /// Resolves DIAE and labels each observation with `tau / tau_r` when a
    /// lifetime is given.
    pub fn finish(mut self, lifetime: Option<f64>) -> Result<FeatureTable> {
        if let Some(col) = self.feature_set.iter().position(|&f| f == Feature::Diae) {
            let ae: Vec<f64> = self.rows.iter().map(|r| r[col]).collect();
            let di = degradation_index(&ae, self.params.baseline_len(ae.len()))?;
            for (row, v) in self.rows.iter_mut().zip(di) {
                row[col] = v;
            }
        }
        let rows = self
            .rows
            .into_iter()
            .zip(&self.taus)
            .map(|(values, &tau)| {
                let rho = lifetime.map(|t_r| pul_ratio(tau, t_r)).transpose()?;
                FeatureVector::new(values, tau, rho)
            })
            .collect::<Result<Vec<_>>>()?;
        FeatureTable::new(self.feature_set, self.indices, rows)
    }
}

/// Extracts one feature vector per window.
///
/// `lifetime` is the run-to-failure duration of a labeled training recording;
/// pass `None` for recordings whose end of life is unknown.
pub fn extract_features(
    windows: &[SignalWindow],
    feature_set: &[Feature],
    params: &FeatureParams,
    lifetime: Option<f64>,
) -> Result<FeatureTable> {
    let mut ex = FeatureExtractor::new(feature_set.to_vec(), params.clone())?;
    ex.push_batch(windows)?;
    ex.finish(lifetime)
}
