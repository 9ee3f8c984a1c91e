use crate::environments::{arm_mean, Environment, RewardKind};
use crate::error::{BanditError, Result};
use crate::rng::RngStream;
use crate::{ArmIndex, Reward};

/// One optimal arm at `(1 + delta) / 2`, every other arm at `(1 - delta) / 2`.
pub fn stochastic_gap_means(k: usize, delta: f64, best: ArmIndex) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(BanditError::range("gap", delta, 0.0, 1.0));
    }
    if best >= k {
        return Err(BanditError::InvalidArgument(format!(
            "best arm {best} out of range for {k} arms"
        )));
    }
    let mut means = vec![0.5 * (1.0 - delta); k];
    means[best] = 0.5 * (1.0 + delta);
    Ok(means)
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| {
        if n == 1 {
            hi
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        }
    })
}

/// `clusters` groups of `per_cluster` consecutive arms. Group 0 spans
/// `[top - within, top]`; every other group spans
/// `[top - between - within, top - between]`.
pub fn clustered_gap_means(
    clusters: usize,
    per_cluster: usize,
    between: f64,
    within: f64,
    top: f64,
) -> Result<Vec<f64>> {
    if clusters == 0 || per_cluster == 0 {
        return Err(BanditError::InvalidArgument(
            "clustered environment needs at least one cluster and one arm per cluster".into(),
        ));
    }
    if !(0.0..=1.0).contains(&top) {
        return Err(BanditError::range("top mean", top, 0.0, 1.0));
    }
    if !(between >= 0.0) || !(within >= 0.0) {
        return Err(BanditError::InvalidArgument(format!(
            "gaps must be non-negative (between = {between}, within = {within})"
        )));
    }
    let floor = top - between - within;
    if floor < 0.0 {
        return Err(BanditError::range("lowest clustered mean", floor, 0.0, 1.0));
    }
    let mut means = Vec::with_capacity(clusters * per_cluster);
    means.extend(linspace(top - within, top, per_cluster));
    for _ in 1..clusters {
        means.extend(linspace(floor, top - between, per_cluster));
    }
    Ok(means)
}

/// Fixed means with fresh noise every round.
#[derive(Debug, Clone)]
pub struct StationaryEnv {
    means: Vec<f64>,
    kind: RewardKind,
    rng: RngStream,
    u: f64,
    round: u64,
}

impl StationaryEnv {
    pub fn new(means: Vec<f64>, kind: RewardKind, mut rng: RngStream) -> Result<Self> {
        if means.is_empty() {
            return Err(BanditError::InvalidArgument(
                "environment without arms".into(),
            ));
        }
        let lo = means.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        kind.check_support(lo, hi)?;
        let u = rng.uniform();
        Ok(StationaryEnv {
            means,
            kind,
            rng,
            u,
            round: 0,
        })
    }
}

impl Environment for StationaryEnv {
    fn num_arms(&self) -> usize {
        self.means.len()
    }

    fn round(&self) -> u64 {
        self.round
    }

    fn means(&self) -> &[f64] {
        &self.means
    }

    fn pull(&self, arm: ArmIndex) -> Result<Reward> {
        self.kind.realize(arm_mean(&self.means, arm)?, self.u)
    }

    fn advance(&mut self) -> Result<()> {
        self.round += 1;
        self.u = self.rng.uniform();
        Ok(())
    }
}
