//! Rule firing strengths and the maximum-likelihood mixture estimates that
//! project feature-space regimes onto the lifetime axis.
//!
//! The normalized firing degree of rule `j` at observation `k` is used as the
//! estimated posterior probability that the observation belongs to regime
//! `j`. The closed-form mixture estimates then reduce to weighted means:
//! the prior of each regime is its mean posterior, and the time centroid and
//! time variance are the posterior-weighted mean and variance of `tau`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Denominators below this are treated as total underflow.
pub const UNDERFLOW: f64 = 1e-300;

/// Gaussian membership `exp(-(x - c)^2 / (2 sigma^2))`.
#[inline]
pub fn gaussian(x: f64, center: f64, sigma: f64) -> f64 {
    let z = (x - center) / sigma;
    (-0.5 * z * z).exp()
}

/// Gaussian antecedents shared by all rules: per-rule centers, per-dimension
/// spreads and per-rule weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Antecedents {
    pub centers: Vec<Vec<f64>>,
    pub sigmas: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Antecedents {
    /// Unit-weight antecedents.
    pub fn new(centers: Vec<Vec<f64>>, sigmas: Vec<f64>) -> Result<Self> {
        let weights = vec![1.0; centers.len()];
        Self::with_weights(centers, sigmas, weights)
    }

    pub fn with_weights(centers: Vec<Vec<f64>>, sigmas: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::input("a rule base needs at least one rule"));
        }
        if weights.len() != centers.len() {
            return Err(Error::input("one weight per rule is required"));
        }
        if let Some(j) = centers.iter().position(|c| c.len() != sigmas.len()) {
            return Err(Error::input(format!(
                "rule {j} has {} centers for {} inputs",
                centers[j].len(),
                sigmas.len()
            )));
        }
        if let Some(s) = sigmas.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
            return Err(Error::input(format!("membership spread must be positive, got {s}")));
        }
        if let Some(w) = weights.iter().find(|w| !(0.0..=1.0).contains(*w)) {
            return Err(Error::input(format!("rule weight {w} is outside [0, 1]")));
        }
        Ok(Self {
            centers,
            sigmas,
            weights,
        })
    }

    pub fn rule_count(&self) -> usize {
        self.centers.len()
    }

    pub fn input_dim(&self) -> usize {
        self.sigmas.len()
    }

    /// Degree of fulfillment of every rule: weight times the product of the
    /// per-dimension memberships.
    pub fn firing(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.input_dim());
        self.centers
            .iter()
            .zip(&self.weights)
            .map(|(c, &r)| {
                r * v
                    .iter()
                    .zip(c)
                    .zip(&self.sigmas)
                    .map(|((&x, &ci), &s)| gaussian(x, ci, s))
                    .product::<f64>()
            })
            .collect()
    }

    /// Normalized firing degrees for every row.
    pub fn normalized_firing_table(&self, inputs: &[Vec<f64>]) -> Vec<Vec<f64>> {
        inputs.iter().map(|v| normalize_firing(&self.firing(v))).collect()
    }
}

/// Scales degrees to sum to one; total underflow yields the uniform distribution.
pub fn normalize_firing(w: &[f64]) -> Vec<f64> {
    let total: f64 = w.iter().sum();
    if !(total >= UNDERFLOW) {
        return vec![1.0 / w.len() as f64; w.len()];
    }
    w.iter().map(|x| x / total).collect()
}

/// Lifetime projection of one regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeCluster {
    /// Estimated prior probability of the regime, also its rule confidence.
    pub prior: f64,
    /// Time centroid in seconds.
    pub centroid: f64,
    /// Time variance in seconds squared.
    pub variance: f64,
}

impl TimeCluster {
    /// Gaussian membership of an elapsed time in this regime.
    pub fn membership(&self, tau: f64) -> f64 {
        time_membership(tau, self)
    }
}

pub fn time_membership(tau: f64, cluster: &TimeCluster) -> f64 {
    let d = tau - cluster.centroid;
    (-(d * d) / (2.0 * cluster.variance)).exp()
}

/// Time clusters for all rules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeClusterParams {
    pub clusters: Vec<TimeCluster>,
}

impl TimeClusterParams {
    pub fn validate(&self, rules: usize) -> Result<()> {
        if self.clusters.len() != rules {
            return Err(Error::input(format!(
                "{} time clusters for {rules} rules",
                self.clusters.len()
            )));
        }
        for (j, c) in self.clusters.iter().enumerate() {
            if !(0.0..=1.0).contains(&c.prior) || !c.centroid.is_finite() || !(c.variance > 0.0 && c.variance.is_finite()) {
                return Err(Error::input(format!("time cluster {j} is invalid: {c:?}")));
            }
        }
        Ok(())
    }

    pub fn priors(&self) -> Vec<f64> {
        self.clusters.iter().map(|c| c.prior).collect()
    }
}

/// Smallest positive gap between sorted distinct times, or 1 s when there is none.
fn observation_interval(tau: &[f64]) -> f64 {
    let mut t = tau.to_vec();
    t.sort_by(f64::total_cmp);
    t.windows(2)
        .map(|w| w[1] - w[0])
        .filter(|d| *d > 0.0)
        .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |a| a.min(d))))
        .unwrap_or(1.0)
}

/// Priors, time centroids and time variances from a `K x J` table of
/// posterior estimates (rows summing to one).
///
/// A zero variance (all of a regime's mass on one instant) is clamped to
/// `(0.01 * observation interval)^2` so the time membership stays defined.
pub fn estimate_time_clusters(tau: &[f64], posteriors: &[Vec<f64>]) -> Result<TimeClusterParams> {
    let k = tau.len();
    if k < 2 {
        return Err(Error::input("time clusters need at least 2 observations"));
    }
    if posteriors.len() != k {
        return Err(Error::input(format!("{} posterior rows for {k} observations", posteriors.len())));
    }
    let rules = posteriors[0].len();
    if rules == 0 || posteriors.iter().any(|r| r.len() != rules) {
        return Err(Error::input("posterior rows must all have one entry per rule"));
    }
    let (t_min, t_max) = tau
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &t| (a.min(t), b.max(t)));
    let min_var = (0.01 * observation_interval(tau)).powi(2);

    let clusters = (0..rules)
        .map(|j| {
            let mass: f64 = posteriors.iter().map(|r| r[j]).sum();
            if !(mass > 0.0) {
                return Err(Error::input(format!("rule {j} receives no posterior mass")));
            }
            let centroid = (tau.iter().zip(posteriors).map(|(t, r)| t * r[j]).sum::<f64>() / mass)
                .clamp(t_min, t_max);
            let variance = tau
                .iter()
                .zip(posteriors)
                .map(|(t, r)| (t - centroid).powi(2) * r[j])
                .sum::<f64>()
                / mass;
            Ok(TimeCluster {
                prior: mass / k as f64,
                centroid,
                variance: if variance > 0.0 { variance.max(min_var) } else { min_var },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TimeClusterParams { clusters })
}

/// Firing degrees re-weighted by regime prior and time membership, normalized.
pub fn weighted_firing(v: &[f64], tau: f64, antecedents: &Antecedents, time: &TimeClusterParams) -> Vec<f64> {
    let w = antecedents.firing(v);
    let raw: Vec<f64> = w
        .iter()
        .zip(&time.clusters)
        .map(|(&w, c)| c.prior * c.membership(tau) * w)
        .collect();
    normalize_firing(&raw)
}

/// One multivariate normal component with diagonal covariance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub mean: Vec<f64>,
    pub variances: Vec<f64>,
}

/// A finite mixture of diagonal-covariance normals.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureDensity {
    components: Vec<MixtureComponent>,
}

impl MixtureDensity {
    pub fn new(components: Vec<MixtureComponent>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::input("a mixture needs at least one component"))?;
        let dim = first.mean.len();
        for (j, c) in components.iter().enumerate() {
            if c.mean.len() != dim || c.variances.len() != dim {
                return Err(Error::input(format!("component {j} has inconsistent dimensions")));
            }
            if c.variances.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                return Err(Error::input(format!("component {j} covariance is not positive definite")));
            }
            if !(c.weight >= 0.0) {
                return Err(Error::input(format!("component {j} has negative proportion")));
            }
        }
        let total: f64 = components.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::input(format!("mixture proportions sum to {total}, not 1")));
        }
        Ok(Self { components })
    }

    /// Components built from posterior estimates: proportion = mean posterior,
    /// mean and variance per feature = posterior-weighted moments.
    pub fn from_posteriors(inputs: &[Vec<f64>], posteriors: &[Vec<f64>]) -> Result<Self> {
        if inputs.is_empty() || inputs.len() != posteriors.len() {
            return Err(Error::input("inputs and posteriors must be non-empty and aligned"));
        }
        let k = inputs.len() as f64;
        let dim = inputs[0].len();
        let rules = posteriors[0].len();
        let components = (0..rules)
            .map(|j| {
                let mass: f64 = posteriors.iter().map(|r| r[j]).sum();
                let mean: Vec<f64> = (0..dim)
                    .map(|i| inputs.iter().zip(posteriors).map(|(v, r)| v[i] * r[j]).sum::<f64>() / mass)
                    .collect();
                let variances: Vec<f64> = (0..dim)
                    .map(|i| {
                        inputs
                            .iter()
                            .zip(posteriors)
                            .map(|(v, r)| (v[i] - mean[i]).powi(2) * r[j])
                            .sum::<f64>()
                            / mass
                    })
                    .collect();
                MixtureComponent {
                    weight: mass / k,
                    mean,
                    variances,
                }
            })
            .collect();
        Self::new(components)
    }

    pub fn components(&self) -> &[MixtureComponent] {
        &self.components
    }

    fn log_component(c: &MixtureComponent, v: &[f64]) -> f64 {
        let dim = c.mean.len() as f64;
        let log_det: f64 = c.variances.iter().map(|s| s.ln()).sum();
        let quad: f64 = v
            .iter()
            .zip(&c.mean)
            .zip(&c.variances)
            .map(|((x, m), s)| (x - m).powi(2) / s)
            .sum();
        -0.5 * (dim * (2.0 * std::f64::consts::PI).ln() + log_det + quad)
    }

    /// Mixture density at `v`.
    pub fn density(&self, v: &[f64]) -> f64 {
        self.components
            .iter()
            .map(|c| c.weight * Self::log_component(c, v).exp())
            .sum()
    }

    /// Posterior probability of each component at `v` (Bayes' rule), computed
    /// in log space so far-away points do not underflow to 0/0.
    pub fn posteriors(&self, v: &[f64]) -> Vec<f64> {
        let logs: Vec<f64> = self
            .components
            .iter()
            .map(|c| c.weight.ln() + Self::log_component(c, v))
            .collect();
        let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !top.is_finite() {
            return vec![1.0 / logs.len() as f64; logs.len()];
        }
        let unnorm: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
        normalize_firing(&unnorm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn firing_examples() {
        let a = Antecedents::new(vec![vec![1.0, 2.0]], vec![0.5, 0.25]).unwrap();
        assert_eq!(a.firing(&[1.0, 2.0]), vec![1.0]);
        let a = Antecedents::new(vec![vec![3.0]], vec![2.0]).unwrap();
        assert!((a.firing(&[5.0])[0] - (-0.5f64).exp()).abs() < 1e-15);
        let a = Antecedents::new(vec![vec![0.0, 0.0]], vec![1.5, 0.7]).unwrap();
        let w = a.firing(&[1.5, 1.4])[0];
        assert!((w - (-2.5f64).exp()).abs() < 1e-15);
        assert!((w - 0.082085).abs() < 1e-6);
        let a = Antecedents::with_weights(vec![vec![0.0]], vec![1.0], vec![0.4]).unwrap();
        assert!((a.firing(&[0.0])[0] - 0.4).abs() < 1e-15);
    }

    #[test]
    fn antecedent_validation() {
        assert!(Antecedents::new(vec![], vec![1.0]).is_err());
        assert!(Antecedents::new(vec![vec![0.0]], vec![0.0]).is_err());
        assert!(Antecedents::new(vec![vec![0.0, 1.0]], vec![1.0]).is_err());
        assert!(Antecedents::with_weights(vec![vec![0.0]], vec![1.0], vec![1.5]).is_err());
    }

    #[test]
    fn normalization_examples() {
        assert_eq!(normalize_firing(&[1.0]), vec![1.0]);
        assert_eq!(normalize_firing(&[2.0, 2.0]), vec![0.5, 0.5]);
        let n = normalize_firing(&[0.3, 0.1, 0.6]);
        for (a, b) in n.iter().zip([0.3, 0.1, 0.6]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(normalize_firing(&[0.0, 0.0, 0.0, 0.0]), vec![0.25; 4]);
    }

    #[test]
    fn time_cluster_examples() {
        let p = estimate_time_clusters(&[0.0, 1.0, 2.0, 3.0], &[
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
        ])
        .unwrap();
        assert_eq!(p.clusters[0].prior, 0.5);
        let p = estimate_time_clusters(&[10.0, 20.0, 30.0], &[
            vec![1.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
        ])
        .unwrap();
        assert_eq!(p.clusters[0].centroid, 15.0);
        assert_eq!(p.clusters[0].variance, 25.0);
        // Second rule has all mass at t = 30: variance clamped to (0.01 * 10)^2.
        assert_eq!(p.clusters[1].centroid, 30.0);
        assert!((p.clusters[1].variance - 0.01).abs() < 1e-15);
        assert!(estimate_time_clusters(&[1.0, 2.0], &[vec![1.0, 0.0], vec![1.0, 0.0]]).is_err());
    }

    #[test]
    fn time_membership_examples() {
        let c = TimeCluster {
            prior: 0.5,
            centroid: 100.0,
            variance: 16.0,
        };
        assert_eq!(c.membership(100.0), 1.0);
        assert!((c.membership(104.0) - (-0.5f64).exp()).abs() < 1e-15);
        assert!((c.membership(112.0) - 0.011109).abs() < 1e-6);
    }

    #[test]
    fn weighted_firing_examples() {
        let one = Antecedents::new(vec![vec![0.0]], vec![1.0]).unwrap();
        let t1 = TimeClusterParams {
            clusters: vec![TimeCluster {
                prior: 1.0,
                centroid: 0.0,
                variance: 1.0,
            }],
        };
        assert_eq!(weighted_firing(&[40.0], 1e6, &one, &t1), vec![1.0]);

        let two = Antecedents::new(vec![vec![0.0], vec![0.0]], vec![1.0]).unwrap();
        let tc = |prior| TimeCluster {
            prior,
            centroid: 5.0,
            variance: 2.0,
        };
        let t2 = TimeClusterParams {
            clusters: vec![tc(0.75), tc(0.25)],
        };
        let w = weighted_firing(&[0.0], 5.0, &two, &t2);
        assert!((w[0] - 0.75).abs() < 1e-15 && (w[1] - 0.25).abs() < 1e-15);

        let two = Antecedents::new(vec![vec![0.0], vec![1.0]], vec![0.8]).unwrap();
        let t2 = TimeClusterParams {
            clusters: vec![tc(0.5), tc(0.5)],
        };
        let w = weighted_firing(&[0.3], 9.0, &two, &t2);
        assert_eq!(w, normalize_firing(&two.firing(&[0.3])));
    }

    #[test]
    fn mixture_examples() {
        let single = MixtureDensity::new(vec![MixtureComponent {
            weight: 1.0,
            mean: vec![0.0, 1.0],
            variances: vec![1.0, 2.0],
        }])
        .unwrap();
        assert_eq!(single.posteriors(&[5.0, -3.0]), vec![1.0]);

        let sym = MixtureDensity::new(vec![
            MixtureComponent {
                weight: 0.5,
                mean: vec![-1.0],
                variances: vec![0.3],
            },
            MixtureComponent {
                weight: 0.5,
                mean: vec![1.0],
                variances: vec![0.3],
            },
        ])
        .unwrap();
        let p = sym.posteriors(&[0.0]);
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);

        // Direct evaluation of the 1-D two-component density.
        let m = MixtureDensity::new(vec![
            MixtureComponent {
                weight: 0.3,
                mean: vec![0.0],
                variances: vec![1.0],
            },
            MixtureComponent {
                weight: 0.7,
                mean: vec![2.0],
                variances: vec![0.25],
            },
        ])
        .unwrap();
        let x = 1.2f64;
        let n = |mu: f64, var: f64| (-(x - mu).powi(2) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt();
        let want = 0.3 * n(0.0, 1.0) + 0.7 * n(2.0, 0.25);
        assert!((m.density(&[x]) - want).abs() < 1e-15);
        let post = m.posteriors(&[x]);
        assert!((post[0] - 0.3 * n(0.0, 1.0) / want).abs() < 1e-14);
    }

    #[test]
    fn mixture_validation() {
        let bad_cov = MixtureComponent {
            weight: 1.0,
            mean: vec![0.0],
            variances: vec![0.0],
        };
        assert!(MixtureDensity::new(vec![bad_cov]).is_err());
        let bad_weight = MixtureComponent {
            weight: 0.8,
            mean: vec![0.0],
            variances: vec![1.0],
        };
        assert!(MixtureDensity::new(vec![bad_weight]).is_err());
    }
}
