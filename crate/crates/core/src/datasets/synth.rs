//! Synthetic run-to-failure feature trajectories.
//!
//! Each feature starts at 1 and grows piecewise linearly in the life ratio,
//! with `regimes` equal-length segments whose slopes increase from one
//! segment to the next (degradation accelerates). Gaussian noise with a
//! standard deviation of `noise` times the clean feature range is added.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::clustering::TrainingTable;
use crate::error::{Error, Result};
use crate::features::FeatureTable;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    /// Number of degradation regimes (`>= 1`).
    pub regimes: usize,
    /// Seconds from first observation to failure.
    pub lifetime: f64,
    /// Noise standard deviation relative to the feature range.
    pub noise: f64,
    pub observations: usize,
    pub features: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            regimes: 3,
            lifetime: 10_000.0,
            noise: 0.05,
            observations: 200,
            features: 1,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.regimes == 0 {
            return Err(Error::config("synthetic data needs at least one regime"));
        }
        if !(self.lifetime > 0.0 && self.lifetime.is_finite()) {
            return Err(Error::config("synthetic lifetime must be positive"));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return Err(Error::config("synthetic noise level must be non-negative"));
        }
        if self.observations < 2 || self.features == 0 {
            return Err(Error::config("synthetic data needs at least 2 observations and 1 feature"));
        }
        Ok(())
    }

    /// Slope of feature `i` in regime `j`.
    fn slope(&self, i: usize, j: usize) -> f64 {
        (1.0 + 0.5 * i as f64) * ((j + 1) * (j + 1)) as f64
    }

    /// Noise-free value of feature `i` at life ratio `rho`.
    pub fn clean_feature(&self, i: usize, rho: f64) -> f64 {
        let seg = 1.0 / self.regimes as f64;
        let mut value = 1.0;
        for j in 0..self.regimes {
            let lo = j as f64 * seg;
            if rho <= lo {
                break;
            }
            value += self.slope(i, j) * (rho.min(lo + seg) - lo);
        }
        value
    }

    fn names(&self) -> Vec<String> {
        (1..=self.features).map(|i| format!("f{i}")).collect()
    }
}

/// One synthetic bearing: evenly spaced observations from `tau = 0` to the
/// lifetime, labeled with `rho = tau / lifetime`.
pub fn synth_bearing(seed: u64, config: &SynthConfig) -> Result<TrainingTable> {
    config.validate()?;
    let n = config.observations;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ranges: Vec<f64> = (0..config.features)
        .map(|i| config.clean_feature(i, 1.0) - config.clean_feature(i, 0.0))
        .collect();
    let mut inputs = Vec::with_capacity(n);
    let mut tau = Vec::with_capacity(n);
    let mut rho = Vec::with_capacity(n);
    for k in 0..n {
        let r = k as f64 / (n - 1) as f64;
        let row = (0..config.features)
            .map(|i| {
                let clean = config.clean_feature(i, r);
                if config.noise > 0.0 {
                    let normal = Normal::new(0.0, config.noise * ranges[i]).expect("positive spread");
                    clean + normal.sample(&mut rng)
                } else {
                    clean
                }
            })
            .collect();
        inputs.push(row);
        tau.push(r * config.lifetime);
        rho.push(r);
    }
    TrainingTable::new(config.names(), inputs, tau, rho)
}

/// The same bearing as a labeled feature table.
pub fn synth_feature_table(seed: u64, config: &SynthConfig) -> Result<FeatureTable> {
    let t = synth_bearing(seed, config)?;
    FeatureTable::from_rows(t.names().to_vec(), t.observations().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::ClusterConfig;
    use crate::fis::{identify, Variant};
    use crate::rul::rrmse;

    fn clean(regimes: usize) -> SynthConfig {
        SynthConfig {
            regimes,
            noise: 0.0,
            ..SynthConfig::default()
        }
    }

    #[test]
    fn deterministic() {
        let c = SynthConfig::default();
        assert_eq!(synth_bearing(7, &c).unwrap(), synth_bearing(7, &c).unwrap());
        assert_ne!(synth_bearing(7, &c).unwrap(), synth_bearing(8, &c).unwrap());
    }

    #[test]
    fn single_regime_is_affine_in_time() {
        let c = SynthConfig {
            features: 2,
            ..clean(1)
        };
        let t = synth_bearing(1, &c).unwrap();
        for (v, &tau) in t.inputs().iter().zip(t.tau()) {
            assert!((v[0] - (1.0 + tau / c.lifetime)).abs() < 1e-12);
            assert!((v[1] - (1.0 + 1.5 * tau / c.lifetime)).abs() < 1e-12);
        }
        assert_eq!(t.rho()[0], 0.0);
        assert_eq!(*t.rho().last().unwrap(), 1.0);
    }

    #[test]
    fn piecewise_trajectory_is_continuous_and_accelerating() {
        let c = clean(3);
        assert_eq!(c.clean_feature(0, 0.0), 1.0);
        assert!((c.clean_feature(0, 1.0) - (1.0 + (1.0 + 4.0 + 9.0) / 3.0)).abs() < 1e-12);
        let eps = 1e-9;
        let b = 1.0 / 3.0;
        assert!((c.clean_feature(0, b + eps) - c.clean_feature(0, b - eps)).abs() < 1e-8);
    }

    #[test]
    fn clean_three_regimes_recovered_by_weighted_fit() {
        let c = clean(3);
        let train = synth_bearing(1, &c).unwrap();
        // Recovering three linear pieces through smooth memberships needs more
        // than three rules; a radius of 0.2 yields eight.
        let (_, model) = identify(&train, &ClusterConfig::with_radius(0.2), Variant::Weighted).unwrap();
        let test = synth_bearing(2, &SynthConfig { observations: 157, ..c }).unwrap();
        let est: Vec<f64> = test
            .observations()
            .map(|o| model.infer_observation(&o).unwrap().raw)
            .collect();
        let score = rrmse(test.rho(), &est).unwrap();
        assert!(score < 0.05, "held-out RRMSE {score}");
    }

    #[test]
    fn feature_table_schema() {
        let t = synth_feature_table(3, &SynthConfig::default()).unwrap();
        assert_eq!(t.names(), ["f1"]);
        assert!(t.is_labeled());
        assert_eq!(t.len(), 200);
    }

    #[test]
    fn invalid_configs() {
        assert!(synth_bearing(0, &SynthConfig { regimes: 0, ..SynthConfig::default() }).is_err());
        assert!(synth_bearing(0, &SynthConfig { lifetime: 0.0, ..SynthConfig::default() }).is_err());
    }
}
