//! Run configuration: a TOML file whose keys mirror the library's settings
//! structs, plus command-line and environment overrides.
//!
//! Precedence, highest first: command-line flag, `SRHT_*` environment
//! variable, config file, built-in default. A top-level `seed` (from any of
//! these sources) replaces the dataset, training and feature-map seeds.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use srht::datagen::DatasetSpec;
use srht::pipeline::{CvGrid, Method, TrainSettings};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    pub dataset: DatasetSpec,
    #[serde(default)]
    pub train: TrainSettings,
    /// Enables grid cross-validation over `(ε, ρ̄)` when present.
    #[serde(default)]
    pub cross_validation: Option<CvGrid>,
    #[serde(default)]
    pub eval: EvalSettings,
    #[serde(default)]
    pub worst_case: WorstCaseSettings,
}

fn default_out() -> PathBuf {
    PathBuf::from("srht-out")
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalSettings {
    /// Detector file; defaults to `<out>/detector.json`.
    pub detector: Option<PathBuf>,
    /// Kernel draws per test point for the robust bound; 0 skips it.
    pub robust_m: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WorstCaseSettings {
    pub samples_per_center: usize,
}

impl Default for WorstCaseSettings {
    fn default() -> Self {
        WorstCaseSettings {
            samples_per_center: 200,
        }
    }
}

/// Values that may come from flags or the environment.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub method: Option<Method>,
    pub budget_nodes: Option<usize>,
    pub budget_secs: Option<f64>,
}

impl RunConfig {
    pub fn parse(text: &str, origin: &Path) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("{}: {}", origin.display(), e.message())))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text, path)
    }

    /// Applies overrides and the top-level seed, then validates every section.
    pub fn resolve(mut self, o: &Overrides) -> Result<Self, CliError> {
        if o.seed.is_some() {
            self.seed = o.seed;
        }
        if let Some(out) = &o.out {
            self.out = out.clone();
        }
        if let Some(method) = o.method {
            self.train.method = method;
        }
        if let Some(nodes) = o.budget_nodes {
            self.train.bnb.max_nodes = Some(nodes);
        }
        if let Some(secs) = o.budget_secs {
            if !(secs > 0.0) {
                return Err(CliError::Config(format!("--budget-secs must be positive, got {secs}")));
            }
            self.train.bnb.max_secs = Some(secs);
        }
        if let Some(seed) = self.seed {
            self.dataset.seed = seed;
            self.train.seed = seed;
            self.train.features.seed = seed;
            self.train.cvar.seed = seed;
        }
        self.dataset
            .validate()
            .map_err(|e| CliError::Config(format!("[dataset] {e}")))?;
        self.train
            .validate()
            .map_err(|e| CliError::Config(format!("[train] {e}")))?;
        if let Some(grid) = &self.cross_validation {
            if grid.cells().is_empty() {
                return Err(CliError::Config("[cross_validation] grid is empty".into()));
            }
            if grid.epsilon.iter().chain(&grid.rho_bar).any(|v| !(v.is_finite() && *v >= 0.0))
                || grid.epsilon.iter().any(|&e| e <= 0.0)
            {
                return Err(CliError::Config(
                    "[cross_validation] needs positive epsilon and nonnegative rho_bar values".into(),
                ));
            }
        }
        if self.worst_case.samples_per_center == 0 {
            return Err(CliError::Config("[worst_case] samples_per_center must be at least 1".into()));
        }
        Ok(self)
    }

    /// SHA-256 of the resolved configuration's JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        format!("{:x}", Sha256::digest(json.as_bytes()))
    }

    pub fn detector_path(&self) -> PathBuf {
        self.eval
            .detector
            .clone()
            .unwrap_or_else(|| self.out.join("detector.json"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[dataset]
kind = "two-moons"
n_train = 4
n_test = 4
dim = 2
noise = 0.1
"#;

    #[test]
    fn minimal_config_resolves() {
        let c = RunConfig::parse(MINIMAL, Path::new("x.toml")).unwrap();
        let r = c.resolve(&Overrides::default()).unwrap();
        assert_eq!(r.train.method, Method::Exact);
        assert_eq!(r.hash(), r.clone().hash());
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = format!("{MINIMAL}\n[train]\nmethd = \"cvar\"\n");
        let err = RunConfig::parse(&text, Path::new("x.toml")).unwrap_err();
        assert!(err.to_string().contains("methd"), "{err}");
    }

    #[test]
    fn seed_override_propagates() {
        let c = RunConfig::parse(MINIMAL, Path::new("x.toml")).unwrap();
        let o = Overrides {
            seed: Some(9),
            ..Overrides::default()
        };
        let r = c.resolve(&o).unwrap();
        assert_eq!((r.dataset.seed, r.train.seed, r.train.features.seed), (9, 9, 9));
    }
}
