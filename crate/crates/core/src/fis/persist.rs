//! Model files: a versioned JSON document.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Rule, TsFisModel, Variant};
use crate::config::Config;
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Where a model came from: training recordings and the effective configuration.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    #[serde(default)]
    pub datasets: Vec<String>,
    #[serde(default)]
    pub config_hash: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<Config>,
}

impl Provenance {
    pub fn new(datasets: Vec<String>, config: &Config) -> Self {
        Self {
            datasets,
            config_hash: config.hash(),
            config: Some(config.clone()),
        }
    }
}

/// Serialized form of a [`TsFisModel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub schema_version: u32,
    pub variant: Variant,
    pub feature_set: Vec<String>,
    pub sigmas: Vec<f64>,
    pub rules: Vec<Rule>,
    pub provenance: Provenance,
}

impl From<&TsFisModel> for ModelDocument {
    fn from(m: &TsFisModel) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            variant: m.variant(),
            feature_set: m.feature_set().to_vec(),
            sigmas: m.sigmas().to_vec(),
            rules: m.rules().to_vec(),
            provenance: m.provenance().clone(),
        }
    }
}

impl TryFrom<ModelDocument> for TsFisModel {
    type Error = Error;

    fn try_from(doc: ModelDocument) -> Result<Self> {
        if doc.schema_version != SCHEMA_VERSION {
            return Err(Error::Model(format!(
                "schema version {} is not supported (expected {SCHEMA_VERSION})",
                doc.schema_version
            )));
        }
        TsFisModel::new(doc.feature_set, doc.sigmas, doc.rules, doc.variant, doc.provenance)
            .map_err(|e| Error::Model(e.to_string()))
    }
}

impl TsFisModel {
    /// Attaches training provenance; returns the model for chaining.
    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.set_provenance(provenance);
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&ModelDocument::from(self)).expect("model serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ModelDocument = serde_json::from_str(text).map_err(|e| Error::Model(e.to_string()))?;
        doc.try_into()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text).map_err(|e| Error::Model(format!("{}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixture::TimeCluster;

    fn weighted_model() -> TsFisModel {
        let rules = (0..3)
            .map(|j| Rule {
                centers: vec![0.1 * j as f64 + 1.0 / 3.0, 2.0 - j as f64],
                weight: 1.0,
                slopes: vec![0.123456789012345, -1e-7 * j as f64],
                intercept: 0.1 + j as f64 / 7.0,
                time: Some(TimeCluster {
                    prior: [0.2, 0.3, 0.5][j],
                    centroid: 1000.0 * j as f64 + 0.1,
                    variance: 12345.678 + j as f64,
                }),
            })
            .collect();
        TsFisModel::new(
            vec!["rms".into(), "se".into()],
            vec![0.3, 1.0 / 7.0],
            rules,
            Variant::Weighted,
            Provenance::new(vec!["b1.csv".into()], &Config::default()),
        )
        .unwrap()
    }

    #[test]
    fn json_round_trip_is_exact() {
        let m = weighted_model();
        let back = TsFisModel::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
        for k in 0..50 {
            let v = [0.01 * k as f64, 1.5 - 0.02 * k as f64];
            let tau = Some(40.0 * k as f64);
            assert_eq!(m.infer(&v, tau).unwrap(), back.infer(&v, tau).unwrap());
        }
    }

    #[test]
    fn rejects_bad_documents() {
        let good = weighted_model().to_json();
        assert!(TsFisModel::from_json(&good.replace("\"schema_version\": 1", "\"schema_version\": 9")).is_err());
        assert!(TsFisModel::from_json(&good.replace("\"weighted\"", "\"baseline\"")).is_err());
        assert!(TsFisModel::from_json("{}").is_err());
        assert!(TsFisModel::from_json("not json").is_err());
    }
}
