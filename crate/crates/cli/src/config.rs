//! Experiment configuration: one JSON document, unknown keys rejected.

use std::fmt;
use std::path::Path;

use blockbeta_core::{BetaParams, BlockStructure};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

/// Default cost budget in units of `n · reps · d!`.
pub const DEFAULT_BUDGET: f64 = 2e9;

/// A beta exponent written either as a JSON number or as a string such as
/// `"3/2"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BetaValue {
    Number(serde_json::Number),
    Text(String),
}

impl fmt::Display for BetaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BetaValue::Number(n) => write!(f, "{n}"),
            BetaValue::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    FVector,
    VolumeDeficit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub block_dims: Vec<usize>,
    /// Defaults to all zeros.
    #[serde(default)]
    pub betas: Option<Vec<BetaValue>>,
    #[serde(default = "default_n_grid")]
    pub n_grid: Vec<usize>,
    #[serde(default = "default_reps")]
    pub reps_per_n: usize,
    #[serde(default)]
    pub root_seed: u64,
    #[serde(default = "default_observables")]
    pub observables: Vec<Observable>,
    /// Defaults to the number of available cores.
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub budget: Option<f64>,
}

/// 12 geometric points from 10² to 10⁵, rounded.
pub fn default_n_grid() -> Vec<usize> {
    geometric_grid(100, 100_000, 12)
}

pub fn geometric_grid(lo: usize, hi: usize, points: usize) -> Vec<usize> {
    let mut grid: Vec<usize> = (0..points)
        .map(|i| {
            let t = i as f64 / (points - 1).max(1) as f64;
            (lo as f64 * (hi as f64 / lo as f64).powf(t)).round() as usize
        })
        .collect();
    grid.dedup();
    grid
}

fn default_reps() -> usize {
    10
}

fn default_observables() -> Vec<Observable> {
    vec![Observable::FVector]
}

impl ExperimentConfig {
    pub fn new(block_dims: Vec<usize>) -> Self {
        Self {
            block_dims,
            betas: None,
            n_grid: default_n_grid(),
            reps_per_n: default_reps(),
            root_seed: 0,
            observables: default_observables(),
            workers: None,
            budget: None,
        }
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
        let cfg = Self::from_json(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn blocks(&self) -> Result<BlockStructure> {
        Ok(BlockStructure::new(self.block_dims.clone())?)
    }

    pub fn beta_params(&self) -> Result<BetaParams> {
        let bp = match &self.betas {
            None => BetaParams::uniform(self.block_dims.len()),
            Some(values) => BetaParams::parse(&values.iter().map(|v| v.to_string()).collect::<Vec<_>>())?,
        };
        bp.check_paired(&self.blocks()?)?;
        Ok(bp)
    }

    pub fn dim(&self) -> usize {
        self.block_dims.iter().sum()
    }

    pub fn validate(&self) -> Result<()> {
        let bs = self.blocks()?;
        self.beta_params()?;
        let d = bs.total();
        if !(2..=8).contains(&d) {
            return Err(CliError::Config(format!("total dimension {d} outside the supported range 2..=8")));
        }
        if self.n_grid.is_empty() {
            return Err(CliError::Config("n_grid is empty".into()));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::Config("n_grid must be strictly increasing".into()));
        }
        if self.n_grid[0] < d + 2 {
            return Err(CliError::Config(format!("every n must be at least d + 2 = {}", d + 2)));
        }
        if self.reps_per_n == 0 {
            return Err(CliError::Config("reps_per_n must be at least 1".into()));
        }
        if self.workers == Some(0) {
            return Err(CliError::Config("workers must be at least 1".into()));
        }
        if self.observables.is_empty() {
            return Err(CliError::Config("observables must not be empty".into()));
        }
        Ok(())
    }

    pub fn wants(&self, obs: Observable) -> bool {
        self.observables.contains(&obs)
    }

    /// `Σ_n n · reps · d!`.
    pub fn estimated_cost(&self) -> f64 {
        let fact: f64 = (1..=self.dim()).map(|k| k as f64).product();
        self.n_grid.iter().map(|&n| n as f64).sum::<f64>() * self.reps_per_n as f64 * fact
    }

    pub fn check_budget(&self, override_budget: bool) -> Result<()> {
        let budget = self.budget.unwrap_or(DEFAULT_BUDGET);
        let estimate = self.estimated_cost();
        if !override_budget && estimate > budget {
            return Err(CliError::Budget { estimate, budget });
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form, excluding `workers`, which does
    /// not affect results.
    pub fn hash(&self) -> String {
        let mut canon = self.clone();
        canon.workers = None;
        let text = serde_json::to_string(&canon).expect("config serialises");
        Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_parsing() {
        let cfg =
            ExperimentConfig::from_json(r#"{"block_dims": [2, 1], "betas": [0, "1/2"], "root_seed": 9}"#).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.n_grid.len(), 12);
        assert_eq!(cfg.n_grid[0], 100);
        assert_eq!(*cfg.n_grid.last().unwrap(), 100_000);
        assert_eq!(cfg.reps_per_n, 10);
        assert_eq!(cfg.beta_params().unwrap().betas(), &[0.0, 0.5]);
        assert!(cfg.beta_params().unwrap().exact().is_some());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = ExperimentConfig::from_json(r#"{"block_dims": [3], "n_grd": [10, 20]}"#).unwrap_err();
        assert!(err.to_string().contains("unknown field"));
    }

    #[test]
    fn invariants() {
        let mut cfg = ExperimentConfig::new(vec![2, 1]);
        cfg.n_grid = vec![10, 10];
        assert!(cfg.validate().is_err());
        cfg.n_grid = vec![4, 10];
        assert!(cfg.validate().is_err());
        cfg.n_grid = vec![5, 10];
        cfg.validate().unwrap();
        cfg.reps_per_n = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::new(vec![1]);
        cfg.n_grid = vec![5];
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::new(vec![2]);
        cfg.betas = Some(vec![BetaValue::Text("-2".into())]);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn budget_and_hash() {
        let mut cfg = ExperimentConfig::new(vec![4]);
        assert!(cfg.check_budget(false).is_ok());
        cfg.n_grid = vec![10_000_000];
        cfg.reps_per_n = 100;
        assert!(matches!(cfg.check_budget(false), Err(CliError::Budget { .. })));
        assert!(cfg.check_budget(true).is_ok());

        let a = ExperimentConfig::new(vec![2, 1]);
        let mut b = a.clone();
        b.workers = Some(3);
        assert_eq!(a.hash(), b.hash());
        b.root_seed = 1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
