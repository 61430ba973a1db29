//! Suite configuration: defaults, the TOML file format and validation.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use holoherm::hermite::SParam;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest `n_max` a configuration may ask for.
pub const MAX_N_MAX: usize = 24;

/// Largest per-axis node count a configuration may ask for.
pub const MAX_NODES: usize = 401;

/// Default tolerance of every check, keyed `suite.check`.
///
/// A `suite` key on its own overrides every `below` check of that suite that
/// has no key of its own.
pub const DEFAULT_TOLERANCES: &[(&str, f64)] = &[
    ("orthonormal.gram", 1e-8),
    ("orthonormal.hermitian", 1e-12),
    ("orthonormal.monomials", 1e-10),
    ("reproduce.kernel", 1e-8),
    ("reproduce.zero", 1e-300),
    ("reproduce.mehler", 1e-9),
    ("reproduce.abc", 1e-13),
    ("reproduce.phi_weight", 1e-13),
    ("reproduce.projection", 1e-7),
    ("reproduce.idempotence", 1e-6),
    ("ellipse.mu_lambda", 1e-14),
    ("ellipse.weight_identity", 1e-14),
    ("ellipse.gram", 1e-8),
    ("ellipse.norm0", 1e-10),
    ("ellipse.rodrigues", 1e-9),
    ("ellipse.branch", 1e-9),
    ("isomorphism.round_trip", 1e-12),
    ("isomorphism.zero", 1e-300),
    ("isomorphism.isometry", 1e-8),
    ("isomorphism.scaling", 1e-2),
    ("isomorphism.correspondence", 1e-11),
    ("isomorphism.bargmann_gram", 1e-8),
    ("isomorphism.bargmann_pointwise", 1e-9),
    ("isomorphism.b_tstar_gram", 1e-6),
    ("kernels.nested", 1e-6),
    ("kernels.sign", 1e-2),
    ("kernels.c_phi", 1e-8),
    ("kernels.c_phi_modulus", 1e-2),
    ("kernels.c_phi_ratio", 1e-8),
    ("kernels.zero", 1e-300),
];

pub const SUITES: &[&str] = &[
    "orthonormal",
    "reproduce",
    "ellipse",
    "isomorphism",
    "kernels",
];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuiteConfig {
    pub s_values: Vec<f64>,
    /// `(alpha, beta)` pairs; `None` means `(sqrt s, 0)` for every `s` and `(0.8, 0.4)`.
    pub ellipse_params: Option<Vec<[f64; 2]>>,
    #[serde(alias = "N_max")]
    pub n_max: usize,
    /// Per-axis node count of every planar grid and line rule.
    pub nodes: usize,
    /// Node count of the inner integrals in the idempotence check.
    pub projection_nodes: usize,
    pub seed: u64,
    pub output_path: PathBuf,
    pub tolerances: BTreeMap<String, f64>,
    /// Multiplies the prefactor of `K_s` wherever it is used. Anything but 1
    /// is a deliberate corruption for testing the harness.
    pub ks_prefactor_scale: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            s_values: vec![0.25, 0.5, 0.75],
            ellipse_params: None,
            n_max: 12,
            nodes: holoherm::DEFAULT_NODES,
            projection_nodes: 61,
            seed: 42,
            output_path: PathBuf::from("verify-reports"),
            tolerances: BTreeMap::new(),
            ks_prefactor_scale: 1.0,
        }
    }
}

impl SuiteConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: SuiteConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.s_values.is_empty() {
            return Err(invalid("s_values is empty"));
        }
        for &s in &self.s_values {
            SParam::new(s).map_err(|e| invalid(format!("s_values: {e}")))?;
        }
        if let Some(list) = &self.ellipse_params {
            for &[a, b] in list {
                holoherm::hermite::ellipse_params(a, b)
                    .map_err(|e| invalid(format!("ellipse_params: {e}")))?;
            }
        }
        if self.n_max > MAX_N_MAX {
            return Err(invalid(format!(
                "n_max must be <= {MAX_N_MAX}, got {}",
                self.n_max
            )));
        }
        if !(1..=MAX_NODES).contains(&self.nodes) {
            return Err(invalid(format!(
                "nodes must be in 1..={MAX_NODES}, got {}",
                self.nodes
            )));
        }
        if !(1..=MAX_NODES).contains(&self.projection_nodes) {
            return Err(invalid(format!(
                "projection_nodes must be in 1..={MAX_NODES}, got {}",
                self.projection_nodes
            )));
        }
        if !(self.ks_prefactor_scale > 0.0 && self.ks_prefactor_scale.is_finite()) {
            return Err(invalid("ks_prefactor_scale must be positive and finite"));
        }
        for (key, &tol) in &self.tolerances {
            let known =
                SUITES.contains(&key.as_str()) || DEFAULT_TOLERANCES.iter().any(|(k, _)| k == key);
            if !known {
                return Err(invalid(format!("unknown tolerance key {key:?}")));
            }
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(invalid(format!(
                    "tolerance {key:?} must be positive, got {tol}"
                )));
            }
        }
        Ok(())
    }

    pub fn s_params(&self) -> Vec<SParam> {
        self.s_values
            .iter()
            .map(|&s| SParam::new(s).expect("validated"))
            .collect()
    }

    pub fn ellipse_list(&self) -> Vec<(f64, f64)> {
        match &self.ellipse_params {
            Some(list) => list.iter().map(|&[a, b]| (a, b)).collect(),
            None => {
                let mut v: Vec<(f64, f64)> =
                    self.s_values.iter().map(|&s| (s.sqrt(), 0.0)).collect();
                v.push((0.8, 0.4));
                v
            }
        }
    }

    /// Tolerance of a `below` check.
    pub fn tolerance(&self, key: &str) -> f64 {
        if let Some(&t) = self.tolerances.get(key) {
            return t;
        }
        let suite = key.split('.').next().unwrap_or(key);
        if let Some(&t) = self.tolerances.get(suite) {
            return t;
        }
        default_tolerance(key)
    }

    /// Threshold of an `above` check; suite-wide overrides do not apply.
    pub fn threshold(&self, key: &str) -> f64 {
        self.tolerances
            .get(key)
            .copied()
            .unwrap_or_else(|| default_tolerance(key))
    }

    /// All tolerances in effect, for the report header.
    pub fn resolved_tolerances(&self) -> BTreeMap<String, f64> {
        DEFAULT_TOLERANCES
            .iter()
            .map(|(k, _)| (k.to_string(), self.tolerance(k)))
            .collect()
    }
}

fn default_tolerance(key: &str) -> f64 {
    DEFAULT_TOLERANCES
        .iter()
        .find(|(k, _)| *k == key)
        .map(|&(_, t)| t)
        .unwrap_or_else(|| panic!("no default tolerance for {key}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let cfg = SuiteConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.ellipse_list().len(), 4);
        assert_eq!(cfg.ellipse_list()[3], (0.8, 0.4));
        assert_eq!(cfg.tolerance("orthonormal.gram"), 1e-8);
    }

    #[test]
    fn parses_toml_and_rejects_unknown_keys() {
        let cfg = SuiteConfig::from_toml_str(
            "s_values = [0.5]\nN_max = 6\nnodes = 101\n[tolerances]\n\"kernels.nested\" = 1e-5\nreproduce = 1e-6\n",
        )
        .unwrap();
        assert_eq!(cfg.n_max, 6);
        assert_eq!(cfg.tolerance("kernels.nested"), 1e-5);
        assert_eq!(cfg.tolerance("reproduce.kernel"), 1e-6);
        assert_eq!(cfg.threshold("kernels.sign"), 1e-2);
        assert!(matches!(
            SuiteConfig::from_toml_str("colour = 3"),
            Err(ConfigError::Parse(_))
        ));
        assert!(matches!(
            SuiteConfig::from_toml_str("[tolerances]\n\"kernels.bogus\" = 1.0"),
            Err(ConfigError::Invalid(_))
        ));
    }

    #[test]
    fn validation() {
        for text in [
            "n_max = 25",
            "s_values = [1.0]",
            "s_values = []",
            "nodes = 0",
            "[tolerances]\northonormal = 0.0",
        ] {
            assert!(SuiteConfig::from_toml_str(text).is_err(), "{text}");
        }
        assert!(SuiteConfig::from_toml_str("n_max = 24").is_ok());
        assert!(SuiteConfig::from_toml_str("ellipse_params = [[0.0, 0.5]]").is_err());
    }
}
