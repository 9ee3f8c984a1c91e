//! Experiment configuration, read from TOML.
//!
//! Every section rejects unknown keys, so a typo fails loudly instead of
//! silently falling back to a default.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::environments::{ArmGrid, RewardKind};
use crate::error::{BanditError, Result};
use crate::partition::{valid_grid_cluster_counts, PartitionMethod};
use crate::policy::PolicyKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentSection,
    pub environment: EnvironmentConfig,
    /// Defaults to exact replay for traces and Bernoulli draws otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reward: Option<RewardKind>,
    pub algorithm: AlgorithmConfig,
    #[serde(default)]
    pub partition: PartitionConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub lipschitz: LipschitzConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    /// Number of arms `k`.
    pub arms: usize,
    /// Dimension of the arm lattice.
    #[serde(default = "default_dim")]
    pub dim: usize,
    pub horizon: u64,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    #[serde(default)]
    pub seed: u64,
    /// Worker threads; 0 uses every core.
    #[serde(default)]
    pub workers: usize,
}

fn default_dim() -> usize {
    1
}

fn default_repeats() -> usize {
    10
}

fn default_base_phase() -> u64 {
    50
}

fn default_top() -> f64 {
    0.9
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnvironmentConfig {
    StochasticGap {
        delta: f64,
        #[serde(default)]
        best: usize,
    },
    Phased {
        delta: f64,
        #[serde(default)]
        best: usize,
        #[serde(default = "default_base_phase")]
        base_phase: u64,
    },
    /// Lattice arms with mean `1 - ||a* - x||`. `sigma = 0` keeps the optimum
    /// fixed; omitted, it defaults to a hundredth of the lattice spacing.
    Traveling {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sigma: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        start: Option<Vec<f64>>,
    },
    ClusteredGap {
        clusters: usize,
        between: f64,
        within: f64,
        #[serde(default = "default_top")]
        top: f64,
    },
    Trace {
        path: PathBuf,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        features: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmConfig {
    #[serde(rename = "kind")]
    pub mode: AlgorithmMode,
    /// Policy for `kind = "flat"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flat: Option<PolicyKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<PolicyKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub child: Option<PolicyKind>,
    /// Flat policy to compare against in `run`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline: Option<PolicyKind>,
    #[serde(default = "default_ucb_alpha")]
    pub ucb_alpha: f64,
}

fn default_ucb_alpha() -> f64 {
    std::f64::consts::SQRT_2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmMode {
    Flat,
    Abob,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PartitionConfig {
    pub method: PartitionMethod,
    pub clusters: usize,
    /// Fixed `arm,cluster` CSV; overrides `method`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
}

impl Default for PartitionConfig {
    fn default() -> Self {
        PartitionConfig {
            method: PartitionMethod::Grid,
            clusters: 1,
            file: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub clusters: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub max_trajectory_rows: usize,
    /// Score the algorithm by its realized rewards instead of the means of
    /// the arms it played.
    pub realized_regret: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("out"),
            max_trajectory_rows: 10_000,
            realized_regret: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LipschitzConfig {
    pub neighbors: usize,
    pub shuffles: usize,
}

impl Default for LipschitzConfig {
    fn default() -> Self {
        LipschitzConfig {
            neighbors: crate::partition::DEFAULT_NEIGHBORS,
            shuffles: 10,
        }
    }
}

/// The algorithm a run executes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AlgorithmSpec {
    Flat(PolicyKind),
    Abob {
        parent: PolicyKind,
        child: PolicyKind,
    },
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            toml::from_str(text).map_err(|e| BanditError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| BanditError::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| e.context(format!("config {}", path.display())))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn reward_kind(&self) -> RewardKind {
        match (self.reward, &self.environment) {
            (Some(kind), _) => kind,
            (None, EnvironmentConfig::Trace { .. }) => RewardKind::Exact,
            (None, _) => RewardKind::Bernoulli,
        }
    }

    pub fn algorithm_spec(&self) -> Result<AlgorithmSpec> {
        let a = &self.algorithm;
        match a.mode {
            AlgorithmMode::Flat => a.flat.map(AlgorithmSpec::Flat).ok_or_else(|| {
                BanditError::Config("algorithm.flat is required when kind = \"flat\"".into())
            }),
            AlgorithmMode::Abob => match (a.parent, a.child) {
                (Some(parent), Some(child)) => Ok(AlgorithmSpec::Abob { parent, child }),
                _ => Err(BanditError::Config(
                    "algorithm.parent and algorithm.child are required when kind = \"abob\"".into(),
                )),
            },
        }
    }

    /// Checks cross-field rules that the schema alone cannot express.
    pub fn validate(&self) -> Result<()> {
        let e = &self.experiment;
        let bad = |msg: String| Err(BanditError::Config(msg));
        if e.arms == 0 {
            return bad("experiment.arms must be >= 1".into());
        }
        if e.horizon == 0 {
            return bad("experiment.horizon must be >= 1".into());
        }
        if e.repeats == 0 {
            return bad("experiment.repeats must be >= 1".into());
        }
        if self.output.max_trajectory_rows == 0 {
            return bad("output.max_trajectory_rows must be >= 1".into());
        }
        if !(self.algorithm.ucb_alpha >= 0.0) {
            return bad("algorithm.ucb_alpha must be non-negative".into());
        }
        if let RewardKind::Uniform { width } = self.reward_kind() {
            if !(0.0..=1.0).contains(&width) {
                return bad(format!("reward.width {width} outside [0, 1]"));
            }
        }
        self.algorithm_spec()?;

        match &self.environment {
            EnvironmentConfig::StochasticGap { delta, best }
            | EnvironmentConfig::Phased { delta, best, .. } => {
                if !(0.0..=1.0).contains(delta) {
                    return bad(format!("environment.delta {delta} outside [0, 1]"));
                }
                if *best >= e.arms {
                    return bad(format!(
                        "environment.best {best} out of range for {} arms",
                        e.arms
                    ));
                }
                if let EnvironmentConfig::Phased { base_phase: 0, .. } = self.environment {
                    return bad("environment.base_phase must be >= 1".into());
                }
            }
            EnvironmentConfig::Traveling { sigma, start } => {
                let grid = self.grid()?;
                if let Some(s) = sigma {
                    if !(*s >= 0.0) || !s.is_finite() {
                        return bad(format!(
                            "environment.sigma {s} must be a non-negative number"
                        ));
                    }
                }
                if let Some(start) = start {
                    if !grid.contains(start) {
                        return bad(format!(
                            "environment.start {start:?} outside [0, 1/sqrt(d)]^d"
                        ));
                    }
                }
            }
            EnvironmentConfig::ClusteredGap {
                clusters,
                between,
                within,
                top,
            } => {
                if *clusters == 0 || !e.arms.is_multiple_of(*clusters) {
                    return bad(format!(
                        "environment.clusters {clusters} must divide {} arms",
                        e.arms
                    ));
                }
                if !(0.0..=1.0).contains(top)
                    || *between < 0.0
                    || *within < 0.0
                    || top - between - within < 0.0
                {
                    return bad(format!(
                        "clustered means infeasible: top {top}, between {between}, within {within}"
                    ));
                }
            }
            EnvironmentConfig::Trace { path, .. } => {
                if path.as_os_str().is_empty() {
                    return bad("environment.path is empty".into());
                }
            }
        }

        if self.partition.file.is_none() && self.algorithm.mode == AlgorithmMode::Abob {
            self.check_cluster_count(self.partition.clusters)?;
        }
        if let Some(sweep) = &self.sweep {
            if sweep.clusters.is_empty() {
                return bad("sweep.clusters is empty".into());
            }
        }
        Ok(())
    }

    /// The arm lattice, needed for metric environments and grid partitions.
    pub fn grid(&self) -> Result<ArmGrid> {
        ArmGrid::new(self.experiment.arms, self.experiment.dim)
            .map_err(|e| BanditError::Config(format!("experiment.arms/dim: {e}")))
    }

    /// Whether `p` clusters can be built with the configured method.
    pub fn check_cluster_count(&self, p: usize) -> Result<()> {
        let k = self.experiment.arms;
        let err = |msg: String| Err(BanditError::Config(msg));
        if p == 0 || p > k {
            return err(format!("{p} clusters for {k} arms"));
        }
        match self.partition.method {
            PartitionMethod::Grid => {
                let grid = self.grid()?;
                if !valid_grid_cluster_counts(&grid).contains(&p) {
                    return err(format!(
                        "{p} clusters cannot tile the lattice; valid counts: {:?}",
                        valid_grid_cluster_counts(&grid)
                    ));
                }
            }
            PartitionMethod::Shuffled | PartitionMethod::RoundRobin => {
                if !k.is_multiple_of(p) {
                    return err(format!("{p} clusters do not divide {k} arms"));
                }
            }
            PartitionMethod::KMeans => {}
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
[experiment]
arms = 256
dim = 2
horizon = 1000
repeats = 3
seed = 7

[environment]
kind = "traveling"

[algorithm]
kind = "abob"
parent = "tsallis"
child = "tsallis"

[partition]
method = "grid"
clusters = 16
"#;

    #[test]
    fn parses_defaults() {
        let c = ExperimentConfig::from_toml_str(BASE).unwrap();
        assert_eq!(c.reward_kind(), RewardKind::Bernoulli);
        let trace = BASE.replace("kind = \"traveling\"", "kind = \"trace\"\npath = \"t.csv\"");
        assert_eq!(
            ExperimentConfig::from_toml_str(&trace)
                .unwrap()
                .reward_kind(),
            RewardKind::Exact
        );
        assert_eq!(c.output.max_trajectory_rows, 10_000);
        assert_eq!(
            c.algorithm_spec().unwrap(),
            AlgorithmSpec::Abob {
                parent: PolicyKind::TsallisInf,
                child: PolicyKind::TsallisInf
            }
        );
        let again = ExperimentConfig::from_toml_str(&c.to_toml_string()).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn unknown_keys_are_errors() {
        let typo = BASE.replace("horizon = 1000", "horizon = 1000\nhorizn = 5");
        assert!(matches!(
            ExperimentConfig::from_toml_str(&typo),
            Err(BanditError::Config(_))
        ));
        let typo = BASE.replace("kind = \"traveling\"", "kind = \"traveling\"\nsigmaa = 0.1");
        assert!(ExperimentConfig::from_toml_str(&typo).is_err());
        let typo = format!("{BASE}\n[extra]\nx = 1\n");
        assert!(ExperimentConfig::from_toml_str(&typo).is_err());
    }

    #[test]
    fn cross_field_rules() {
        let bad_p = BASE.replace("clusters = 16", "clusters = 8");
        let err = ExperimentConfig::from_toml_str(&bad_p)
            .unwrap_err()
            .to_string();
        assert!(err.contains("valid counts"), "{err}");
        let bad_grid = BASE.replace("arms = 256", "arms = 250");
        assert!(ExperimentConfig::from_toml_str(&bad_grid).is_err());
        let missing_child = BASE.replace("child = \"tsallis\"\n", "");
        assert!(ExperimentConfig::from_toml_str(&missing_child).is_err());
        let gap = BASE.replace(
            "kind = \"traveling\"",
            "kind = \"stochastic_gap\"\ndelta = 1.5",
        );
        assert!(ExperimentConfig::from_toml_str(&gap).is_err());
        let uniform = format!("{BASE}\n[reward]\nkind = \"uniform\"\nwidth = 0.01\n");
        assert_eq!(
            ExperimentConfig::from_toml_str(&uniform)
                .unwrap()
                .reward_kind(),
            RewardKind::Uniform { width: 0.01 }
        );
    }
}
