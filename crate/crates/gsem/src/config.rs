//! Run configuration: a TOML file merged with command-line overrides.
//!
//! Precedence is flag over file over built-in default. Every command
//! echoes the fully resolved configuration it ran with into its output
//! directory; re-running from that echo reproduces the outputs.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::SearchGrid;
use crate::model::{FitOptions, Hyperparameters};

/// Input and output locations.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    /// Drug-disease associations (edge list or dense 0/1 TSV).
    pub associations: Option<PathBuf>,
    /// Disease-disease similarity matrix; required when alpha > 0.
    pub similarity: Option<PathBuf>,
    /// Disease class assignments for interpretation.
    pub classes: Option<PathBuf>,
    /// Previously fitted coefficient matrix to reuse instead of refitting.
    pub coefficients: Option<PathBuf>,
    /// Output directory.
    pub out: Option<PathBuf>,
}

/// Cross-validation settings.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub folds: usize,
    pub ratios: Vec<f64>,
    /// Negative-to-positive ratio on validation folds during tuning.
    pub validation_ratio: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            folds: 10,
            ratios: vec![1.0, 5.0, 10.0, 15.0, 20.0, 30.0, 40.0, 50.0, 100.0],
            validation_ratio: 2.0,
        }
    }
}

/// Hyperparameter search space for `tune`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub taus: Vec<f64>,
}

impl Default for GridConfig {
    fn default() -> Self {
        let grid = SearchGrid::default();
        GridConfig {
            alphas: grid.alphas,
            betas: grid.betas,
            lambdas: grid.lambdas,
            taus: grid.taus,
        }
    }
}

impl GridConfig {
    /// Attaches the fixed diagonal penalty to form a search grid.
    pub fn to_grid(&self, gamma: f64) -> SearchGrid {
        SearchGrid {
            alphas: self.alphas.clone(),
            betas: self.betas.clone(),
            lambdas: self.lambdas.clone(),
            taus: self.taus.clone(),
            gamma,
        }
    }
}

/// Interpretation and network-export settings.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InterpretConfig {
    /// Keep network edges with similarity at or above this, in [0, 1].
    pub edge_threshold: f64,
    /// Drop classes with fewer members from the network export.
    pub min_class_size: usize,
}

impl Default for InterpretConfig {
    fn default() -> Self {
        InterpretConfig {
            edge_threshold: 0.5,
            min_class_size: 10,
        }
    }
}

/// Complete run configuration.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub paths: Paths,
    pub hyperparameters: Hyperparameters,
    pub fit: FitOptions,
    pub eval: EvalConfig,
    pub grid: GridConfig,
    pub interpret: InterpretConfig,
}

impl RunConfig {
    /// Loads and validates a TOML configuration file.
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let config: RunConfig = toml::from_str(&text)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.hyperparameters.validate()?;
        self.fit.validate()?;
        if self.eval.folds < 2 {
            return Err(Error::InvalidConfig(format!(
                "eval.folds must be at least 2, got {}",
                self.eval.folds
            )));
        }
        if self.eval.ratios.is_empty() {
            return Err(Error::InvalidConfig("eval.ratios is empty".into()));
        }
        for &r in &self.eval.ratios {
            if !r.is_finite() || r <= 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "evaluation ratios must be positive, got {r}"
                )));
            }
        }
        if !self.eval.validation_ratio.is_finite() || self.eval.validation_ratio <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "eval.validation_ratio must be positive, got {}",
                self.eval.validation_ratio
            )));
        }
        if !(0.0..=1.0).contains(&self.interpret.edge_threshold) {
            return Err(Error::InvalidConfig(format!(
                "interpret.edge_threshold must lie in [0, 1], got {}",
                self.interpret.edge_threshold
            )));
        }
        Ok(())
    }

    /// Writes the resolved configuration echo.
    pub fn write(&self, path: &Path) -> Result<()> {
        let body = toml::to_string_pretty(self)
            .map_err(|e| Error::InvalidConfig(format!("cannot serialize configuration: {e}")))?;
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                fs::create_dir_all(parent).map_err(|source| Error::Io {
                    path: parent.to_path_buf(),
                    source,
                })?;
            }
        }
        fs::write(path, body).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::TempDir;

    #[test]
    fn defaults_are_valid() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn partial_file_fills_in_defaults() {
        let dir = TempDir::new().unwrap();
        let path = dir.path().join("run.toml");
        fs::write(
            &path,
            "[hyperparameters]\nalpha = 1.0\nbeta = 0.1\ntau = 0.25\n\n[eval]\nfolds = 5\n",
        )
        .unwrap();
        let config = RunConfig::load(&path).unwrap();
        assert_eq!(config.hyperparameters.alpha, 1.0);
        assert_eq!(config.hyperparameters.gamma, 1e4);
        assert_eq!(config.eval.folds, 5);
        assert_eq!(config.eval.ratios.len(), 9);
        assert_eq!(config.fit.maxiter, 3000);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let dir = TempDir::new().unwrap();
        let path = dir.path().join("run.toml");
        fs::write(&path, "[hyperparameters]\nalhpa = 1.0\n").unwrap();
        let err = RunConfig::load(&path).unwrap_err();
        assert!(matches!(err, Error::InvalidConfig(_)));
        assert!(err.to_string().contains("alhpa"), "{err}");
    }

    #[test]
    fn invalid_values_are_rejected() {
        let dir = TempDir::new().unwrap();
        let path = dir.path().join("run.toml");
        fs::write(&path, "[eval]\nfolds = 1\n").unwrap();
        assert!(RunConfig::load(&path).is_err());

        fs::write(&path, "[interpret]\nedge_threshold = 1.5\n").unwrap();
        assert!(RunConfig::load(&path).is_err());

        fs::write(&path, "[eval]\nratios = [1.0, -2.0]\n").unwrap();
        assert!(RunConfig::load(&path).is_err());
    }

    #[test]
    fn echo_round_trips() {
        let dir = TempDir::new().unwrap();
        let mut config = RunConfig::default();
        config.hyperparameters.alpha = 1.0;
        config.paths.associations = Some(PathBuf::from("data/assoc.tsv"));
        config.eval.folds = 4;
        let path = dir.path().join("resolved.toml");
        config.write(&path).unwrap();
        let again = RunConfig::load(&path).unwrap();
        assert_eq!(again.hyperparameters.alpha, 1.0);
        assert_eq!(again.eval.folds, 4);
        assert_eq!(
            again.paths.associations.as_deref(),
            Some(Path::new("data/assoc.tsv"))
        );
        let first = fs::read_to_string(&path).unwrap();
        again.write(&path).unwrap();
        assert_eq!(first, fs::read_to_string(&path).unwrap());
    }
}
