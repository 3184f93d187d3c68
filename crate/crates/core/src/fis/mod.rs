//! Takagi-Sugeno rule base: inference and consequent identification.
//!
//! Rule `j` reads "if `V` is `A_j` then `rho = a_j . V + b_j`". The model
//! output is the firing-weighted mean of the rule consequents. Two
//! identification variants share the same antecedents (from subtractive
//! clustering) and differ only in the weights used to fit the consequents:
//!
//! * `Baseline` uses the normalized firing degrees directly.
//! * `Weighted` multiplies each firing degree by the regime prior and the
//!   rule's time membership before normalizing, and keeps those time
//!   clusters for inference.

mod identify;
mod persist;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use identify::{
    build_design_matrix, identify, identify_baseline, identify_weighted, identify_weighted_with,
    residual_norm_sq, solve_least_squares, LeastSquares,
};
pub use persist::{ModelDocument, Provenance, SCHEMA_VERSION};

use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::mixture::{normalize_firing, weighted_firing, Antecedents, TimeCluster, TimeClusterParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Subtractive clustering with an unweighted least-squares consequent fit.
    Baseline,
    /// Mixture-weighted least squares with time clusters.
    Weighted,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Baseline => "baseline",
            Variant::Weighted => "weighted",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "baseline" => Ok(Variant::Baseline),
            "weighted" => Ok(Variant::Weighted),
            other => Err(Error::config(format!(
                "unknown variant `{other}` (expected baseline or weighted)"
            ))),
        }
    }
}

/// One rule: antecedent centers, rule weight, affine consequent and, for
/// weighted models, its time cluster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    pub centers: Vec<f64>,
    pub weight: f64,
    pub slopes: Vec<f64>,
    pub intercept: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<TimeCluster>,
}

impl Rule {
    /// Local linear model `a . v + b`.
    pub fn consequent(&self, v: &[f64]) -> f64 {
        self.slopes.iter().zip(v).map(|(a, x)| a * x).sum::<f64>() + self.intercept
    }
}

/// Model output at one observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inference {
    /// Aggregated output before any clamping.
    pub raw: f64,
    /// `raw` clamped to `[0, 1]` for RUL conversion.
    pub clamped: f64,
}

/// An identified fuzzy model. Immutable once built; share freely across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct TsFisModel {
    feature_set: Vec<String>,
    antecedents: Antecedents,
    rules: Vec<Rule>,
    time: Option<TimeClusterParams>,
    variant: Variant,
    provenance: Provenance,
}

impl TsFisModel {
    pub fn new(feature_set: Vec<String>, sigmas: Vec<f64>, rules: Vec<Rule>, variant: Variant, provenance: Provenance) -> Result<Self> {
        let dim = feature_set.len();
        if dim == 0 {
            return Err(Error::input("model has no input features"));
        }
        if sigmas.len() != dim {
            return Err(Error::input(format!("{} spreads for {dim} features", sigmas.len())));
        }
        for (j, r) in rules.iter().enumerate() {
            if r.centers.len() != dim || r.slopes.len() != dim {
                return Err(Error::input(format!("rule {j} does not match the {dim} inputs")));
            }
            if r.centers.iter().chain(&r.slopes).any(|v| !v.is_finite()) || !r.intercept.is_finite() {
                return Err(Error::input(format!("rule {j} has non-finite parameters")));
            }
        }
        let antecedents = Antecedents::with_weights(
            rules.iter().map(|r| r.centers.clone()).collect(),
            sigmas,
            rules.iter().map(|r| r.weight).collect(),
        )?;
        let time = match variant {
            Variant::Baseline => {
                if rules.iter().any(|r| r.time.is_some()) {
                    return Err(Error::input("baseline rules must not carry time clusters"));
                }
                None
            }
            Variant::Weighted => {
                let clusters = rules
                    .iter()
                    .enumerate()
                    .map(|(j, r)| r.time.ok_or_else(|| Error::input(format!("weighted rule {j} has no time cluster"))))
                    .collect::<Result<Vec<_>>>()?;
                let params = TimeClusterParams { clusters };
                params.validate(rules.len())?;
                Some(params)
            }
        };
        Ok(Self {
            feature_set,
            antecedents,
            rules,
            time,
            variant,
            provenance,
        })
    }

    pub fn feature_set(&self) -> &[String] {
        &self.feature_set
    }

    pub fn sigmas(&self) -> &[f64] {
        &self.antecedents.sigmas
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule_count(&self) -> usize {
        self.rules.len()
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn antecedents(&self) -> &Antecedents {
        &self.antecedents
    }

    pub fn time_clusters(&self) -> Option<&TimeClusterParams> {
        self.time.as_ref()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub(crate) fn set_provenance(&mut self, provenance: Provenance) {
        self.provenance = provenance;
    }

    /// Normalized rule weights used for aggregation at one observation.
    pub fn rule_weights(&self, v: &[f64], tau: Option<f64>) -> Result<Vec<f64>> {
        if v.len() != self.feature_set.len() {
            return Err(Error::input(format!(
                "observation has {} inputs, model expects {}",
                v.len(),
                self.feature_set.len()
            )));
        }
        if let Some(x) = v.iter().find(|x| !x.is_finite()) {
            return Err(Error::input(format!("non-finite input {x}")));
        }
        match &self.time {
            None => Ok(normalize_firing(&self.antecedents.firing(v))),
            Some(time) => {
                let tau = tau.ok_or_else(|| {
                    Error::input("weighted model needs the elapsed time of every observation")
                })?;
                if !tau.is_finite() {
                    return Err(Error::input("elapsed time is not finite"));
                }
                Ok(weighted_firing(v, tau, &self.antecedents, time))
            }
        }
    }

    /// Estimated life ratio for one observation.
    pub fn infer(&self, v: &[f64], tau: Option<f64>) -> Result<Inference> {
        let w = self.rule_weights(v, tau)?;
        let raw: f64 = w.iter().zip(&self.rules).map(|(w, r)| w * r.consequent(v)).sum();
        Ok(Inference {
            raw,
            clamped: raw.clamp(0.0, 1.0),
        })
    }

    pub fn infer_observation(&self, obs: &FeatureVector) -> Result<Inference> {
        self.infer(&obs.values, Some(obs.tau))
    }
}
