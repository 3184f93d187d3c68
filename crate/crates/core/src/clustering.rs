//! Subtractive clustering of the joint input/output training matrix.
//!
//! Each row of the training matrix is `[v_1 .. v_I, rho]`. Columns are min-max
//! normalized before potentials are evaluated, since the features carry
//! different units; the returned centers are the selected data rows in their
//! original units.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureTable, FeatureVector};

/// Training observations with inputs, elapsed time and life ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingTable {
    names: Vec<String>,
    inputs: Vec<Vec<f64>>,
    tau: Vec<f64>,
    rho: Vec<f64>,
}

impl TrainingTable {
    pub fn new<S: ToString>(names: Vec<S>, inputs: Vec<Vec<f64>>, tau: Vec<f64>, rho: Vec<f64>) -> Result<Self> {
        let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let k = inputs.len();
        if k < 2 {
            return Err(Error::input(format!("training needs at least 2 observations, got {k}")));
        }
        if tau.len() != k || rho.len() != k {
            return Err(Error::input("training columns have different lengths"));
        }
        if names.is_empty() {
            return Err(Error::input("training table has no input features"));
        }
        for (i, row) in inputs.iter().enumerate() {
            if row.len() != names.len() {
                return Err(Error::input(format!(
                    "observation {i} has {} inputs, expected {}",
                    row.len(),
                    names.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) || !tau[i].is_finite() {
                return Err(Error::input(format!("observation {i} has a non-finite entry")));
            }
            if !(0.0..=1.0).contains(&rho[i]) {
                return Err(Error::input(format!("observation {i} life ratio {} is outside [0, 1]", rho[i])));
            }
        }
        Ok(Self { names, inputs, tau, rho })
    }

    /// Pools labeled feature tables (one per training bearing) into one table.
    pub fn from_feature_tables(tables: &[FeatureTable]) -> Result<Self> {
        let first = tables
            .first()
            .ok_or_else(|| Error::input("no training recordings"))?;
        let mut inputs = Vec::new();
        let mut tau = Vec::new();
        let mut rho = Vec::new();
        for (n, t) in tables.iter().enumerate() {
            if t.names() != first.names() {
                return Err(Error::config(format!(
                    "training recording {} has features [{}], expected [{}]",
                    n + 1,
                    t.names().join(","),
                    first.names().join(",")
                )));
            }
            for (k, row) in t.rows().iter().enumerate() {
                let r = row.rho.ok_or_else(|| {
                    Error::input(format!("training recording {} observation {} has no life ratio", n + 1, k + 1))
                })?;
                inputs.push(row.values.clone());
                tau.push(row.tau);
                rho.push(r);
            }
        }
        Self::new(first.names().to_vec(), inputs, tau, rho)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn inputs(&self) -> &[Vec<f64>] {
        &self.inputs
    }

    pub fn tau(&self) -> &[f64] {
        &self.tau
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn input_dim(&self) -> usize {
        self.names.len()
    }

    /// Rows of the joint matrix `[inputs.., rho]`.
    pub fn joint_rows(&self) -> Vec<Vec<f64>> {
        self.inputs
            .iter()
            .zip(&self.rho)
            .map(|(v, &r)| {
                let mut row = v.clone();
                row.push(r);
                row
            })
            .collect()
    }

    pub fn observations(&self) -> impl Iterator<Item = FeatureVector> + '_ {
        self.inputs
            .iter()
            .zip(&self.tau)
            .zip(&self.rho)
            .map(|((v, &t), &r)| FeatureVector {
                values: v.clone(),
                tau: t,
                rho: Some(r),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusterConfig {
    /// Influence radius in normalized units.
    pub ra: f64,
    /// Squash radius; conventionally `1.25 * ra`.
    pub rb: f64,
    pub accept_ratio: f64,
    pub reject_ratio: f64,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        Self::with_radius(0.5)
    }
}

impl ClusterConfig {
    /// Chiu's acceptance and rejection ratios with `rb = 1.25 * ra`.
    pub fn with_radius(ra: f64) -> Self {
        Self {
            ra,
            rb: 1.25 * ra,
            accept_ratio: 0.5,
            reject_ratio: 0.15,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ra > 0.0 && self.ra.is_finite()) {
            return Err(Error::config(format!("influence radius must be positive, got {}", self.ra)));
        }
        if !(self.rb > self.ra && self.rb.is_finite()) {
            return Err(Error::config(format!(
                "squash radius {} must exceed the influence radius {}",
                self.rb, self.ra
            )));
        }
        if !(0.0 < self.reject_ratio && self.reject_ratio < self.accept_ratio && self.accept_ratio <= 1.0) {
            return Err(Error::config(format!(
                "thresholds must satisfy 0 < reject ({}) < accept ({}) <= 1",
                self.reject_ratio, self.accept_ratio
            )));
        }
        Ok(())
    }
}

/// Cluster centers in original units plus the shared input spreads.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSet {
    /// `J` rows of `[c_1 .. c_I, c*]`.
    pub centers: Vec<Vec<f64>>,
    /// Row index in the training matrix of each center.
    pub center_rows: Vec<usize>,
    /// Gaussian spread per input dimension.
    pub sigmas: Vec<f64>,
}

impl ClusterSet {
    pub fn rule_count(&self) -> usize {
        self.centers.len()
    }

    /// Input-space part of center `j`.
    pub fn input_center(&self, j: usize) -> &[f64] {
        let row = &self.centers[j];
        &row[..row.len() - 1]
    }

    /// Output-space part of center `j`.
    pub fn output_center(&self, j: usize) -> f64 {
        *self.centers[j].last().expect("center rows are non-empty")
    }
}

fn normalize_columns(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let dim = rows[0].len();
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for r in rows {
        for (d, &v) in r.iter().enumerate() {
            lo[d] = lo[d].min(v);
            hi[d] = hi[d].max(v);
        }
    }
    rows.iter()
        .map(|r| {
            r.iter()
                .enumerate()
                .map(|(d, &v)| {
                    let span = hi[d] - lo[d];
                    if span > 0.0 {
                        (v - lo[d]) / span
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect()
}

fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

/// Index of the largest value; the lowest index wins ties.
fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate().skip(1) {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// Chiu's subtractive clustering; returns the row indices selected as centers.
///
/// Works on rows already scaled to comparable units.
pub fn select_centers(points: &[Vec<f64>], config: &ClusterConfig) -> Result<Vec<usize>> {
    config.validate()?;
    if points.is_empty() {
        return Err(Error::input("subtractive clustering needs at least one point"));
    }
    let alpha = 4.0 / (config.ra * config.ra);
    let beta = 4.0 / (config.rb * config.rb);

    let mut potential: Vec<f64> = points
        .iter()
        .map(|p| points.iter().map(|q| (-alpha * dist_sq(p, q)).exp()).sum())
        .collect();

    let first = argmax(&potential);
    let first_potential = potential[first];
    let mut centers = vec![first];
    let mut last = first;
    let mut last_potential = first_potential;

    loop {
        for (p, pot) in points.iter().zip(potential.iter_mut()) {
            *pot -= last_potential * (-beta * dist_sq(p, &points[last])).exp();
        }
        // Rejected candidates are zeroed and the next best is considered without
        // another subtraction round.
        loop {
            let cand = argmax(&potential);
            let p = potential[cand];
            if p > config.accept_ratio * first_potential {
                centers.push(cand);
                last = cand;
                last_potential = p;
                break;
            }
            if p < config.reject_ratio * first_potential {
                return Ok(centers);
            }
            let d_min = centers
                .iter()
                .map(|&c| dist_sq(&points[cand], &points[c]).sqrt())
                .fold(f64::INFINITY, f64::min);
            if d_min / config.ra + p / first_potential >= 1.0 {
                centers.push(cand);
                last = cand;
                last_potential = p;
                break;
            }
            potential[cand] = 0.0;
            if potential.iter().all(|&v| v <= 0.0) {
                return Ok(centers);
            }
        }
    }
}

/// Spread of each input membership function: `ra * (max - min) / (2 * sqrt 2)`
/// over the raw (un-normalized) column.
///
/// A constant column would give a zero spread; it is clamped to
/// `1e-9 * max(1, |value|)` instead.
pub fn input_sigmas(inputs: &[Vec<f64>], ra: f64) -> Result<Vec<f64>> {
    let first = inputs
        .first()
        .ok_or_else(|| Error::input("no observations for input spreads"))?;
    (0..first.len())
        .map(|d| {
            let (lo, hi) = inputs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                (lo.min(r[d]), hi.max(r[d]))
            });
            if !(hi > lo) {
                let floor = 1e-9 * lo.abs().max(1.0);
                warn!("input column {d} is constant ({lo}); spread clamped to {floor}");
                return Ok(floor);
            }
            Ok(ra * (hi - lo) / (2.0 * std::f64::consts::SQRT_2))
        })
        .collect()
}

/// Clusters the joint matrix of a training table.
pub fn subtractive_cluster(table: &TrainingTable, config: &ClusterConfig) -> Result<ClusterSet> {
    let rows = table.joint_rows();
    let normalized = normalize_columns(&rows);
    let center_rows = select_centers(&normalized, config)?;
    Ok(ClusterSet {
        centers: center_rows.iter().map(|&i| rows[i].clone()).collect(),
        center_rows,
        sigmas: input_sigmas(table.inputs(), config.ra)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn two_groups(seed: u64, gap: f64) -> Vec<Vec<f64>> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut pts = Vec::new();
        for g in 0..2 {
            for _ in 0..10 {
                let base = g as f64 * gap;
                pts.push(vec![base + rng.random_range(-0.02..0.02), base + rng.random_range(-0.02..0.02)]);
            }
        }
        pts
    }

    #[test]
    fn config_validation() {
        assert!(ClusterConfig::default().validate().is_ok());
        assert_eq!(ClusterConfig::default().rb, 0.625);
        assert!(ClusterConfig { ra: 0.0, ..Default::default() }.validate().is_err());
        assert!(ClusterConfig { rb: 0.4, ..Default::default() }.validate().is_err());
        assert!(ClusterConfig { reject_ratio: 0.6, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn single_and_identical_points() {
        assert_eq!(select_centers(&[vec![0.3, 0.2]], &ClusterConfig::default()).unwrap(), vec![0]);
        let same = vec![vec![1.0, 1.0]; 7];
        assert_eq!(select_centers(&same, &ClusterConfig::default()).unwrap(), vec![0]);
        assert!(select_centers(&[], &ClusterConfig::default()).is_err());
    }

    #[test]
    fn separated_groups_give_two_centers() {
        let gap = 0.9 / 2f64.sqrt();
        let pts = two_groups(4, gap);
        let centers = select_centers(&pts, &ClusterConfig::default()).unwrap();
        assert_eq!(centers.len(), 2);
        let mut groups: Vec<usize> = centers.iter().map(|&c| c / 10).collect();
        groups.sort();
        assert_eq!(groups, vec![0, 1]);
        for &c in &centers {
            let g = c / 10;
            let mean: Vec<f64> = (0..2)
                .map(|d| pts[g * 10..g * 10 + 10].iter().map(|p| p[d]).sum::<f64>() / 10.0)
                .collect();
            assert!(dist_sq(&pts[c], &mean).sqrt() < 0.05);
        }
    }

    #[test]
    fn rule_count_does_not_grow_with_radius() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let pts: Vec<Vec<f64>> = (0..60)
            .map(|i| {
                let g = (i % 3) as f64 * 0.45;
                vec![g + rng.random_range(-0.05..0.05), g * 0.5 + rng.random_range(-0.05..0.05)]
            })
            .collect();
        let counts: Vec<usize> = [0.3, 0.5, 0.7]
            .iter()
            .map(|&ra| select_centers(&pts, &ClusterConfig::with_radius(ra)).unwrap().len())
            .collect();
        assert!(counts.windows(2).all(|w| w[1] <= w[0]), "{counts:?}");
    }

    #[test]
    fn sigma_formula() {
        let s = input_sigmas(&[vec![0.0], vec![4.0 * 2f64.sqrt()]], 0.5).unwrap();
        assert!((s[0] - 1.0).abs() < 1e-15);
        let s = input_sigmas(&[vec![1.0], vec![1.0 + 2.0 * 2f64.sqrt()]], 0.5).unwrap();
        assert!((s[0] - 0.5).abs() < 1e-15);
        let s = input_sigmas(&[vec![3.0], vec![3.0]], 0.5).unwrap();
        assert!((s[0] - 3e-9).abs() < 1e-22);
    }

    #[test]
    fn centers_are_rows_in_original_units() {
        let inputs: Vec<Vec<f64>> = (0..30).map(|k| vec![100.0 + (k as f64).powi(2), k as f64 * 0.01]).collect();
        let tau: Vec<f64> = (0..30).map(|k| k as f64 * 10.0).collect();
        let rho: Vec<f64> = tau.iter().map(|t| t / 290.0).collect();
        let table = TrainingTable::new(vec!["a", "b"], inputs, tau, rho).unwrap();
        let set = subtractive_cluster(&table, &ClusterConfig::default()).unwrap();
        assert!(set.rule_count() >= 1);
        for (c, &row) in set.centers.iter().zip(&set.center_rows) {
            assert_eq!(&c[..2], table.inputs()[row].as_slice());
            assert_eq!(c[2], table.rho()[row]);
        }
        let again = subtractive_cluster(&table, &ClusterConfig::default()).unwrap();
        assert_eq!(set, again);
    }

    #[test]
    fn table_validation() {
        assert!(TrainingTable::new(vec!["a"], vec![vec![1.0]], vec![0.0], vec![0.0]).is_err());
        assert!(TrainingTable::new(vec!["a"], vec![vec![1.0], vec![2.0]], vec![0.0, 1.0], vec![0.0, 1.5]).is_err());
        assert!(TrainingTable::new(vec!["a"], vec![vec![1.0], vec![f64::NAN]], vec![0.0, 1.0], vec![0.0, 1.0]).is_err());
    }
}
