use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::environments::{
    clustered_gap_means, load_features_csv, stochastic_gap_means, Environment, PhasedEnv,
    RewardTrace, StationaryEnv, TraceEnv, TravelingEnv,
};
use crate::error::{BanditError, Result};
use crate::hierarchy::Abob;
use crate::partition::{
    grid_partition, kmeans_partition, round_robin_partition, shuffled_partition, ArmFeatures,
    KMeansOptions, Partition, PartitionMethod,
};
use crate::policy::{AnyPolicy, Policy, PolicyParams};
use crate::rng::{Label, RngStream};
use crate::runner::config::{AlgorithmSpec, EnvironmentConfig, ExperimentConfig};
use crate::runner::regret::RegretTracker;
use crate::runner::stats::{mean, sample_std};

/// Full trajectory of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub repeat: usize,
    /// Selected cluster per round, -1 for flat policies.
    pub clusters: Vec<i32>,
    pub arms: Vec<u32>,
    pub rewards: Vec<f64>,
    pub cum_regret: Vec<f64>,
    /// Per-arm sum of the means over the whole run.
    pub mean_totals: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryRow {
    /// One-based round.
    pub t: u64,
    pub cluster: i32,
    pub arm: u32,
    pub reward: f64,
    pub cum_regret: f64,
}

impl RunRecord {
    pub fn len(&self) -> usize {
        self.arms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arms.is_empty()
    }

    pub fn final_regret(&self) -> f64 {
        self.cum_regret.last().copied().unwrap_or(0.0)
    }

    /// Rounds `stride, 2 stride, ...` plus the last round, with
    /// `stride = ceil(T / max_rows)`; at most `max_rows` rows.
    pub fn trajectory(&self, max_rows: usize) -> Vec<TrajectoryRow> {
        let n = self.len();
        if n == 0 {
            return Vec::new();
        }
        let stride = n.div_ceil(max_rows.max(1));
        let mut rounds: Vec<usize> = (stride..=n).step_by(stride).collect();
        if rounds.last() != Some(&n) {
            rounds.push(n);
        }
        rounds
            .into_iter()
            .map(|t| TrajectoryRow {
                t: t as u64,
                cluster: self.clusters[t - 1],
                arm: self.arms[t - 1],
                reward: self.rewards[t - 1],
                cum_regret: self.cum_regret[t - 1],
            })
            .collect()
    }
}

/// Stream for repeat `repeat` under master seed `seed`.
pub fn run_stream(seed: u64, repeat: usize) -> RngStream {
    RngStream::from_seed(seed).derive(Label::Run(repeat))
}

pub fn load_trace(config: &ExperimentConfig) -> Result<Option<RewardTrace>> {
    match &config.environment {
        EnvironmentConfig::Trace { path, .. } => RewardTrace::load(path).map(Some),
        _ => Ok(None),
    }
}

/// Builds the configured environment. `trace` must be supplied for trace
/// replay (see [`load_trace`]).
pub fn build_environment(
    config: &ExperimentConfig,
    trace: Option<&RewardTrace>,
    rng: &RngStream,
) -> Result<Box<dyn Environment + Send>> {
    let k = config.experiment.arms;
    let kind = config.reward_kind();
    Ok(match &config.environment {
        EnvironmentConfig::StochasticGap { delta, best } => Box::new(StationaryEnv::new(
            stochastic_gap_means(k, *delta, *best)?,
            kind,
            rng.clone(),
        )?),
        EnvironmentConfig::Phased {
            delta,
            best,
            base_phase,
        } => Box::new(PhasedEnv::new(
            k,
            *delta,
            *best,
            *base_phase,
            kind,
            rng.clone(),
        )?),
        EnvironmentConfig::Traveling { sigma, start } => {
            let grid = config.grid()?;
            let sigma = sigma.unwrap_or_else(|| TravelingEnv::default_sigma(&grid));
            let start = start.clone().unwrap_or_else(|| grid.center());
            Box::new(TravelingEnv::new(grid, start, sigma, kind, rng)?)
        }
        EnvironmentConfig::ClusteredGap {
            clusters,
            between,
            within,
            top,
        } => Box::new(StationaryEnv::new(
            clustered_gap_means(*clusters, k / clusters, *between, *within, *top)?,
            kind,
            rng.clone(),
        )?),
        EnvironmentConfig::Trace { path, .. } => {
            let trace = trace
                .cloned()
                .ok_or_else(|| BanditError::Data(format!("trace {} not loaded", path.display())))?;
            if trace.num_arms() != k {
                return Err(BanditError::Config(format!(
                    "trace {} has {} arms but experiment.arms = {k}",
                    path.display(),
                    trace.num_arms()
                )));
            }
            let env = TraceEnv::new(trace, kind, rng.clone())?;
            if env.max_rounds() < config.experiment.horizon {
                return Err(BanditError::Config(format!(
                    "trace {} covers {} rounds, fewer than the horizon {}",
                    path.display(),
                    env.max_rounds(),
                    config.experiment.horizon
                )));
            }
            Box::new(env)
        }
    })
}

/// Feature vectors used for k-means and the Lipschitz estimator: the
/// trace's feature file when given, lattice positions otherwise.
pub fn arm_features(config: &ExperimentConfig) -> Result<ArmFeatures> {
    if let EnvironmentConfig::Trace {
        features: Some(path),
        ..
    } = &config.environment
    {
        let file = std::fs::File::open(path).map_err(|e| BanditError::io(path, e))?;
        let points = load_features_csv(file, &path.display().to_string())?;
        if points.len() != config.experiment.arms {
            return Err(BanditError::Config(format!(
                "{} lists {} arms, expected {}",
                path.display(),
                points.len(),
                config.experiment.arms
            )));
        }
        return Ok(ArmFeatures::new(points)?.normalized());
    }
    Ok(ArmFeatures::from_grid(&config.grid()?))
}

pub fn build_partition(config: &ExperimentConfig, p: usize, rng: &RngStream) -> Result<Partition> {
    let k = config.experiment.arms;
    if let Some(path) = &config.partition.file {
        let file = std::fs::File::open(path).map_err(|e| BanditError::io(path, e))?;
        let part = Partition::from_csv_reader(file, &path.display().to_string())?;
        if part.num_arms() != k {
            return Err(BanditError::Config(format!(
                "partition file {} covers {} arms, expected {k}",
                path.display(),
                part.num_arms()
            )));
        }
        return Ok(part);
    }
    config.check_cluster_count(p)?;
    let mut rng = rng.clone();
    match config.partition.method {
        PartitionMethod::Grid => grid_partition(&config.grid()?, p),
        PartitionMethod::KMeans => kmeans_partition(
            &arm_features(config)?,
            p,
            &mut rng,
            KMeansOptions::default(),
        ),
        PartitionMethod::Shuffled => shuffled_partition(k, p, &mut rng),
        PartitionMethod::RoundRobin => round_robin_partition(k, p),
    }
}

enum Learner {
    Flat(AnyPolicy),
    Hierarchical(Abob),
}

/// One seeded run of `spec` with `clusters` clusters (ignored for flat
/// policies).
pub fn run_with(
    config: &ExperimentConfig,
    spec: AlgorithmSpec,
    clusters: usize,
    repeat: usize,
    trace: Option<&RewardTrace>,
) -> Result<RunRecord> {
    let horizon = config.experiment.horizon;
    let k = config.experiment.arms;
    let run = run_stream(config.experiment.seed, repeat);
    let learner_rng = run.derive(Label::Named("learner"));
    let params = PolicyParams {
        ucb_alpha: config.algorithm.ucb_alpha,
    };

    let mut env = build_environment(config, trace, &run.derive(Label::Env))?;
    let mut learner = match spec {
        // Same stream as the only child of a one-cluster hierarchy.
        AlgorithmSpec::Flat(kind) => Learner::Flat(AnyPolicy::new(
            kind,
            k,
            horizon as f64,
            &params,
            learner_rng.derive(Label::Child(0)),
        )?),
        AlgorithmSpec::Abob { parent, child } => {
            let partition =
                build_partition(config, clusters, &run.derive(Label::Named("partition")))?;
            Learner::Hierarchical(Abob::new(
                partition,
                parent,
                child,
                horizon,
                &params,
                &learner_rng,
            )?)
        }
    };

    let n = horizon as usize;
    let mut record = RunRecord {
        repeat,
        clusters: Vec::with_capacity(n),
        arms: Vec::with_capacity(n),
        rewards: Vec::with_capacity(n),
        cum_regret: Vec::with_capacity(n),
        mean_totals: Vec::new(),
    };
    let mut tracker = RegretTracker::new(k);
    for t in 0..horizon {
        if t > 0 {
            env.advance()?;
        }
        let (cluster, arm, reward) = match &mut learner {
            Learner::Flat(policy) => {
                let arm = policy.select()?;
                let reward = env.pull(arm)?;
                policy.update(arm, reward)?;
                (-1, arm, reward)
            }
            Learner::Hierarchical(h) => {
                let s = h.step(env.as_ref())?;
                (s.cluster as i32, s.arm, s.reward)
            }
        };
        let gain = if config.output.realized_regret {
            reward.get()
        } else {
            env.means()[arm]
        };
        record.cum_regret.push(tracker.push(env.means(), gain)?);
        record.clusters.push(cluster);
        record.arms.push(arm as u32);
        record.rewards.push(reward.get());
    }
    record.mean_totals = tracker.into_mean_totals();
    Ok(record)
}

/// One seeded run of the configured algorithm.
pub fn run_once(config: &ExperimentConfig, repeat: usize) -> Result<RunRecord> {
    let trace = load_trace(config)?;
    run_with(
        config,
        config.algorithm_spec()?,
        config.partition.clusters,
        repeat,
        trace.as_ref(),
    )
    .map_err(|e| e.context(format!("repeat {repeat}")))
}

pub(crate) fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| BanditError::Config(format!("cannot start {workers} workers: {e}")))
}

/// Final regrets of every repeat, plus downsampled trajectories.
#[derive(Debug, Clone, PartialEq)]
pub struct RepeatOutcome {
    pub label: String,
    pub final_regrets: Vec<f64>,
    pub trajectories: Vec<(String, Vec<TrajectoryRow>)>,
}

/// Runs every repeat of `spec`, in parallel; results are ordered by repeat.
pub fn run_repeats(
    config: &ExperimentConfig,
    spec: AlgorithmSpec,
    clusters: usize,
    label: &str,
) -> Result<RepeatOutcome> {
    let trace = load_trace(config)?;
    let max_rows = config.output.max_trajectory_rows;
    let runs: Vec<(f64, Vec<TrajectoryRow>)> =
        thread_pool(config.experiment.workers)?.install(|| {
            (0..config.experiment.repeats)
                .into_par_iter()
                .map(|r| {
                    let rec = run_with(config, spec, clusters, r, trace.as_ref())
                        .map_err(|e| e.context(format!("{label} repeat {r}")))?;
                    Ok((rec.final_regret(), rec.trajectory(max_rows)))
                })
                .collect::<Result<Vec<_>>>()
        })?;
    let mut out = RepeatOutcome {
        label: label.to_string(),
        final_regrets: Vec::with_capacity(runs.len()),
        trajectories: Vec::with_capacity(runs.len()),
    };
    for (r, (fin, traj)) in runs.into_iter().enumerate() {
        out.final_regrets.push(fin);
        out.trajectories.push((format!("{label}_r{r}"), traj));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub p: usize,
    pub mean_regret: f64,
    pub std_regret: f64,
    pub repeats: usize,
    pub final_regrets: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    /// Cluster counts that were skipped, with the reason.
    pub skipped: Vec<(usize, String)>,
    pub trajectories: Vec<(String, Vec<TrajectoryRow>)>,
}

/// Final regret of the configured hierarchy for each cluster count in
/// `p_values`, `repeats` times each. Invalid counts are skipped with a
/// warning. Repeat `r` uses the same seed for every `p`.
pub fn sweep_clusters(config: &ExperimentConfig, p_values: &[usize]) -> Result<SweepOutcome> {
    let spec = match config.algorithm_spec()? {
        AlgorithmSpec::Abob { parent, child } => AlgorithmSpec::Abob { parent, child },
        AlgorithmSpec::Flat(_) => {
            return Err(BanditError::Config(
                "a cluster sweep needs algorithm.kind = \"abob\"".into(),
            ))
        }
    };
    let mut skipped = Vec::new();
    let mut valid = Vec::new();
    for &p in p_values {
        match config.check_cluster_count(p) {
            Ok(()) => valid.push(p),
            Err(e) => {
                log::warn!("skipping p = {p}: {e}");
                skipped.push((p, e.to_string()));
            }
        }
    }
    let trace = load_trace(config)?;
    let repeats = config.experiment.repeats;
    let max_rows = config.output.max_trajectory_rows;
    let jobs: Vec<(usize, usize)> = valid
        .iter()
        .flat_map(|&p| (0..repeats).map(move |r| (p, r)))
        .collect();
    let results: Vec<(f64, Vec<TrajectoryRow>)> =
        thread_pool(config.experiment.workers)?.install(|| {
            jobs.par_iter()
                .map(|&(p, r)| {
                    let rec = run_with(config, spec, p, r, trace.as_ref())
                        .map_err(|e| e.context(format!("p = {p}, repeat {r}")))?;
                    Ok((rec.final_regret(), rec.trajectory(max_rows)))
                })
                .collect::<Result<Vec<_>>>()
        })?;

    let mut rows = Vec::with_capacity(valid.len());
    let mut trajectories = Vec::with_capacity(jobs.len());
    for (i, &p) in valid.iter().enumerate() {
        let chunk = &results[i * repeats..(i + 1) * repeats];
        let finals: Vec<f64> = chunk.iter().map(|(f, _)| *f).collect();
        for (r, (_, traj)) in chunk.iter().enumerate() {
            trajectories.push((format!("p{p}_r{r}"), traj.clone()));
        }
        rows.push(SweepRow {
            p,
            mean_regret: mean(&finals),
            std_regret: sample_std(&finals),
            repeats,
            final_regrets: finals,
        });
    }
    Ok(SweepOutcome {
        rows,
        skipped,
        trajectories,
    })
}

/// Mean reward of every arm, as seen by the Lipschitz estimator: the
/// time-averaged trace for replays, the round-0 means otherwise.
pub fn reference_rewards(config: &ExperimentConfig) -> Result<Vec<f64>> {
    if let Some(trace) = load_trace(config)? {
        return Ok(trace.time_averaged_means());
    }
    let env = build_environment(
        config,
        None,
        &run_stream(config.experiment.seed, 0).derive(Label::Env),
    )?;
    Ok(env.means().to_vec())
}

pub(crate) fn display(path: &Path) -> String {
    path.display().to_string()
}
