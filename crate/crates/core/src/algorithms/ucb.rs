use crate::error::{BanditError, Result};
use crate::policy::{check_arm, check_arm_count, Policy};
use crate::{ArmIndex, Reward};

/// UCB1 with index `mean_i + alpha * sqrt(ln t / n_i)`.
///
/// Deterministic: unvisited arms are tried in index order, and ties go to the
/// lowest index.
#[derive(Debug, Clone, PartialEq)]
pub struct Ucb1 {
    alpha: f64,
    counts: Vec<u64>,
    means: Vec<f64>,
    t: u64,
    touched: u64,
}

impl Ucb1 {
    pub fn new(k: usize, alpha: f64) -> Result<Self> {
        check_arm_count(k)?;
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(BanditError::InvalidArgument(format!(
                "UCB exploration constant {alpha}"
            )));
        }
        Ok(Ucb1 {
            alpha,
            counts: vec![0; k],
            means: vec![0.0; k],
            t: 0,
            touched: 0,
        })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn total_pulls(&self) -> u64 {
        self.t
    }

    /// The arm UCB1 would play next. Consumes no randomness.
    pub fn best_index(&self) -> ArmIndex {
        if let Some(arm) = self.counts.iter().position(|&n| n == 0) {
            return arm;
        }
        let log_t = (self.t as f64).ln();
        let mut best = 0;
        let mut best_value = f64::NEG_INFINITY;
        for (i, (&n, &mean)) in self.counts.iter().zip(&self.means).enumerate() {
            let value = mean + self.alpha * (log_t / n as f64).sqrt();
            if value > best_value {
                best = i;
                best_value = value;
            }
        }
        best
    }
}

impl Policy for Ucb1 {
    fn num_arms(&self) -> usize {
        self.counts.len()
    }

    fn select(&mut self) -> Result<ArmIndex> {
        self.touched += self.counts.len() as u64;
        Ok(self.best_index())
    }

    fn probabilities(&self) -> Result<Vec<f64>> {
        let mut one_hot = vec![0.0; self.counts.len()];
        one_hot[self.best_index()] = 1.0;
        Ok(one_hot)
    }

    fn update(&mut self, arm: ArmIndex, reward: Reward) -> Result<()> {
        check_arm(arm, self.counts.len())?;
        self.counts[arm] += 1;
        self.means[arm] += (reward.get() - self.means[arm]) / self.counts[arm] as f64;
        self.t += 1;
        Ok(())
    }

    fn entries_touched(&self) -> u64 {
        self.touched
    }
}
