//! Run configuration: a versioned TOML document holding clustering, feature
//! and smoothing settings. The effective configuration is embedded in every
//! model file.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::clustering::ClusterConfig;
use crate::error::{Error, Result};
use crate::features::FeatureParams;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterConfig {
    pub order: usize,
    pub frame: usize,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self { order: 2, frame: 61 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub version: u32,
    pub seed: u64,
    pub cluster: ClusterConfig,
    pub features: FeatureParams,
    pub filter: FilterConfig,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            version: CONFIG_VERSION,
            seed: 0,
            cluster: ClusterConfig::default(),
            features: FeatureParams::default(),
            filter: FilterConfig::default(),
        }
    }
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text).map_err(|e| Error::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text).map_err(|e| Error::config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("configuration is always representable as TOML")
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(Error::config(format!(
                "configuration version {} is not supported (expected {CONFIG_VERSION})",
                self.version
            )));
        }
        self.cluster.validate()?;
        if self.filter.frame.is_multiple_of(2) || self.filter.frame <= self.filter.order {
            return Err(Error::config(format!(
                "smoothing frame {} must be odd and larger than the order {}",
                self.filter.frame, self.filter.order
            )));
        }
        let f = &self.features;
        if f.ae_m == 0 || !(f.ae_r_tol > 0.0) {
            return Err(Error::config("approximate entropy needs m >= 1 and a positive tolerance"));
        }
        if !(f.diae_baseline_fraction > 0.0 && f.diae_baseline_fraction < 1.0) {
            return Err(Error::config("DIAE baseline fraction must lie in (0, 1)"));
        }
        Ok(())
    }

    /// SHA-256 over the canonical JSON form, hex encoded.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("configuration serializes");
        hex::encode(Sha256::digest(&json))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let c = Config::default();
        assert_eq!(Config::from_toml_str(&c.to_toml()).unwrap(), c);
        assert_eq!(c.cluster.rb, 1.25 * c.cluster.ra);
        assert_eq!((c.filter.order, c.filter.frame), (2, 61));
    }

    #[test]
    fn partial_documents_fill_defaults() {
        let c = Config::from_toml_str("[cluster]\nra = 0.4\nrb = 0.5\n").unwrap();
        assert_eq!(c.cluster.ra, 0.4);
        assert_eq!(c.cluster.accept_ratio, 0.5);
        assert_eq!(c.features.ae_m, 2);
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(Config::from_toml_str("version = 7").is_err());
        assert!(Config::from_toml_str("[filter]\nframe = 60").is_err());
        assert!(Config::from_toml_str("[cluster]\nra = 0.5\nrb = 0.2").is_err());
        assert!(Config::from_toml_str("bogus = 1").is_err());
        assert!(Config::from_toml_str("[features]\nae_m = 0").is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = Config::default();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.cluster.ra = 0.6;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
