//! Experiment orchestration: seeded repeats, cluster sweeps, regret,
//! statistics and file output.

pub mod config;
mod experiment;
pub mod output;
mod regret;
mod stats;

pub use config::{AlgorithmMode, AlgorithmSpec, EnvironmentConfig, ExperimentConfig};
pub use experiment::{
    arm_features, build_environment, build_partition, load_trace, reference_rewards, run_once,
    run_repeats, run_stream, run_with, sweep_clusters, RepeatOutcome, RunRecord, SweepOutcome,
    SweepRow, TrajectoryRow,
};
pub use regret::{cumulative_regret, RegretTracker};
pub use stats::{mean, sample_std, sample_variance, welch_t_test, WelchResult};

use std::time::Instant;

use rand::seq::SliceRandom;
use serde::Serialize;

use crate::error::{BanditError, Result};
use crate::partition::lipschitz_estimate;
use crate::rng::{Label, RngStream};
use output::{OutputFiles, LIPSCHITZ_FILE, SUMMARY_FILE, SWEEP_FILE, TRAJECTORY_FILE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Run,
    Sweep,
    Replay,
    Lipschitz,
    Validate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub label: String,
    pub mean_regret: f64,
    pub std_regret: f64,
    pub final_regrets: Vec<f64>,
}

impl From<&RepeatOutcome> for RunSummary {
    fn from(o: &RepeatOutcome) -> Self {
        RunSummary {
            label: o.label.clone(),
            mean_regret: mean(&o.final_regrets),
            std_regret: sample_std(&o.final_regrets),
            final_regrets: o.final_regrets.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub a: String,
    pub b: String,
    pub mean_a: f64,
    pub mean_b: f64,
    #[serde(flatten)]
    pub test: Option<WelchResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Comparison {
    pub fn between(a: &str, xs: &[f64], b: &str, ys: &[f64]) -> Self {
        let test = welch_t_test(xs, ys);
        Comparison {
            a: a.to_string(),
            b: b.to_string(),
            mean_a: mean(xs),
            mean_b: mean(ys),
            error: test.as_ref().err().map(ToString::to_string),
            test: test.ok(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LipschitzSummary {
    pub neighbors: usize,
    pub median: f64,
    pub shuffled_medians: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedCount {
    pub p: usize,
    pub reason: String,
}

/// Contents of `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub command: Command,
    pub seed: u64,
    pub config: ExperimentConfig,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub runs: Vec<RunSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<SweepRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub skipped: Vec<SkippedCount>,
    pub comparisons: Vec<Comparison>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lipschitz: Option<LipschitzSummary>,
    pub wall_clock_seconds: f64,
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Per-arm Lipschitz estimates of the reference rewards, and the median
/// estimate after each of `shuffles` random permutations of the rewards.
pub fn lipschitz_analysis(config: &ExperimentConfig) -> Result<(Vec<f64>, LipschitzSummary)> {
    let features = arm_features(config)?;
    let rewards = reference_rewards(config)?;
    let n = config.lipschitz.neighbors;
    let ell = lipschitz_estimate(&features, &rewards, n)?;
    let base =
        RngStream::from_seed(config.experiment.seed).derive(Label::Named("lipschitz-shuffle"));
    let shuffled_medians = (0..config.lipschitz.shuffles)
        .map(|i| {
            let mut rng = base.derive(Label::Run(i));
            let mut permuted = rewards.clone();
            permuted.shuffle(&mut rng);
            lipschitz_estimate(&features, &permuted, n).map(|l| median(&l))
        })
        .collect::<Result<Vec<_>>>()?;
    let summary = LipschitzSummary {
        neighbors: n,
        median: median(&ell),
        shuffled_medians,
    };
    Ok((ell, summary))
}

/// Runs `command` end to end and writes its files under
/// `config.output.dir`. `validate` only checks the configuration and the
/// partition it describes.
pub fn execute(command: Command, config: &ExperimentConfig) -> Result<Summary> {
    config.validate()?;
    let started = Instant::now();
    let dir = config.output.dir.clone();
    let mut summary = Summary {
        command,
        seed: config.experiment.seed,
        config: config.clone(),
        runs: Vec::new(),
        sweep: Vec::new(),
        skipped: Vec::new(),
        comparisons: Vec::new(),
        lipschitz: None,
        wall_clock_seconds: 0.0,
    };

    let mut files = match command {
        Command::Run | Command::Replay => Some(OutputFiles::prepare(
            &dir,
            &[TRAJECTORY_FILE, SUMMARY_FILE],
        )?),
        Command::Sweep => Some(OutputFiles::prepare(
            &dir,
            &[TRAJECTORY_FILE, SWEEP_FILE, SUMMARY_FILE],
        )?),
        Command::Lipschitz => Some(OutputFiles::prepare(&dir, &[LIPSCHITZ_FILE, SUMMARY_FILE])?),
        Command::Validate => None,
    };

    match command {
        Command::Validate => {
            let trace = load_trace(config)?;
            if config.algorithm.mode == AlgorithmMode::Abob {
                build_partition(
                    config,
                    config.partition.clusters,
                    &run_stream(config.experiment.seed, 0).derive(Label::Named("partition")),
                )?;
            }
            build_environment(
                config,
                trace.as_ref(),
                &run_stream(config.experiment.seed, 0).derive(Label::Env),
            )?;
        }
        Command::Run | Command::Replay => {
            if command == Command::Replay
                && !matches!(config.environment, EnvironmentConfig::Trace { .. })
            {
                return Err(BanditError::Config(
                    "replay needs environment.kind = \"trace\"".into(),
                ));
            }
            let spec = config.algorithm_spec()?;
            let main = run_repeats(
                config,
                spec,
                config.partition.clusters,
                &spec_label(spec, config),
            )?;
            let mut trajectories = main.trajectories.clone();
            summary.runs.push(RunSummary::from(&main));
            if let Some(kind) = config.algorithm.baseline {
                let base = run_repeats(
                    config,
                    AlgorithmSpec::Flat(kind),
                    1,
                    &format!("flat_{kind}"),
                )?;
                summary.comparisons.push(Comparison::between(
                    &main.label,
                    &main.final_regrets,
                    &base.label,
                    &base.final_regrets,
                ));
                summary.runs.push(RunSummary::from(&base));
                trajectories.extend(base.trajectories);
            }
            let files = files.as_mut().expect("prepared");
            files.write_trajectories(&trajectories)?;
        }
        Command::Sweep => {
            let p_values = config
                .sweep
                .as_ref()
                .map(|s| s.clusters.clone())
                .ok_or_else(|| {
                    BanditError::Config("sweep needs a [sweep] section with clusters".into())
                })?;
            let out = sweep_clusters(config, &p_values)?;
            if let Some(reference) = out.rows.iter().find(|r| r.p == 1).or(out.rows.first()) {
                for row in out.rows.iter().filter(|r| r.p != reference.p) {
                    summary.comparisons.push(Comparison::between(
                        &format!("p{}", row.p),
                        &row.final_regrets,
                        &format!("p{}", reference.p),
                        &reference.final_regrets,
                    ));
                }
            }
            let files = files.as_mut().expect("prepared");
            files.write_trajectories(&out.trajectories)?;
            files.write_sweep(&out.rows)?;
            summary.skipped = out
                .skipped
                .into_iter()
                .map(|(p, reason)| SkippedCount { p, reason })
                .collect();
            summary.sweep = out.rows;
        }
        Command::Lipschitz => {
            let (ell, lip) = lipschitz_analysis(config)?;
            files.as_mut().expect("prepared").write_lipschitz(&ell)?;
            summary.lipschitz = Some(lip);
        }
    }

    summary.wall_clock_seconds = started.elapsed().as_secs_f64();
    if let Some(files) = files.as_mut() {
        files.write_summary(&summary)?;
    }
    Ok(summary)
}

fn spec_label(spec: AlgorithmSpec, config: &ExperimentConfig) -> String {
    match spec {
        AlgorithmSpec::Flat(kind) => format!("flat_{kind}"),
        AlgorithmSpec::Abob { parent, child } => {
            format!("abob_{parent}_{child}_p{}", config.partition.clusters)
        }
    }
}
