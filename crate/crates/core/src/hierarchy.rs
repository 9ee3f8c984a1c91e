//! The two-level composite: a parent policy over clusters (virtual arms) and
//! one child policy per cluster over that cluster's arms.

use crate::environments::Environment;
use crate::error::{BanditError, Result};
use crate::partition::Partition;
use crate::policy::{AnyPolicy, Policy, PolicyKind, PolicyParams};
use crate::rng::{Label, RngStream};
use crate::{ArmIndex, Reward};

/// What happened in one round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub cluster: usize,
    pub arm: ArmIndex,
    pub reward: Reward,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Abob {
    partition: Partition,
    parent: AnyPolicy,
    children: Vec<AnyPolicy>,
    horizon: u64,
    step: u64,
}

impl Abob {
    /// EXP3 levels are tuned with `gamma(p, T)` for the parent and
    /// `gamma(|P_i|, T / p)` for child `i`. The parent draws from
    /// `rng.derive(Parent)`, child `i` from `rng.derive(Child(i))`.
    pub fn new(
        partition: Partition,
        parent_kind: PolicyKind,
        child_kind: PolicyKind,
        horizon: u64,
        params: &PolicyParams,
        rng: &RngStream,
    ) -> Result<Self> {
        if horizon == 0 {
            return Err(BanditError::InvalidArgument("horizon must be >= 1".into()));
        }
        let p = partition.num_clusters();
        if parent_kind == PolicyKind::Ucb1 && p > 1 {
            static WARNED: std::sync::Once = std::sync::Once::new();
            WARNED.call_once(|| {
                log::warn!(
                    "UCB1 as the parent treats clusters as stationary arms; their rewards drift while children learn"
                )
            });
        }
        let parent = AnyPolicy::new(
            parent_kind,
            p,
            horizon as f64,
            params,
            rng.derive(Label::Parent),
        )?;
        let child_horizon = horizon as f64 / p as f64;
        let children = partition
            .clusters()
            .iter()
            .enumerate()
            .map(|(i, members)| {
                AnyPolicy::new(
                    child_kind,
                    members.len(),
                    child_horizon,
                    params,
                    rng.derive(Label::Child(i)),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Abob {
            partition,
            parent,
            children,
            horizon,
            step: 0,
        })
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn parent(&self) -> &AnyPolicy {
        &self.parent
    }

    pub fn children(&self) -> &[AnyPolicy] {
        &self.children
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// Total probability entries computed by the parent and every child.
    pub fn entries_touched(&self) -> u64 {
        self.parent.entries_touched()
            + self
                .children
                .iter()
                .map(Policy::entries_touched)
                .sum::<u64>()
    }

    /// One round: the parent picks a cluster, its child picks an arm, the
    /// environment rewards it, and both levels learn from that reward.
    pub fn step<E: Environment + ?Sized>(&mut self, env: &E) -> Result<StepRecord> {
        if self.step >= self.horizon {
            return Err(BanditError::InvalidArgument(format!(
                "horizon of {} steps exhausted",
                self.horizon
            )));
        }
        let cluster = self.parent.select()?;
        let child = &mut self.children[cluster];
        let local = child.select()?;
        let arm = self.partition.global(cluster, local);
        let reward = env.pull(arm)?;
        child.update(local, reward)?;
        self.parent.update(cluster, reward)?;
        self.step += 1;
        Ok(StepRecord {
            cluster,
            arm,
            reward,
        })
    }
}

/// Smallest `l` such that no two arms of the same cluster differ in mean by
/// more than `l` at any time. `mean_rows` holds one mean vector per time.
pub fn ell_of_partition(partition: &Partition, mean_rows: &[Vec<f64>]) -> Result<f64> {
    if mean_rows.is_empty() {
        return Err(BanditError::InvalidArgument("no time steps given".into()));
    }
    let mut ell: f64 = 0.0;
    for (t, row) in mean_rows.iter().enumerate() {
        if row.len() != partition.num_arms() {
            return Err(BanditError::InvalidArgument(format!(
                "row {t} has {} means for {} arms",
                row.len(),
                partition.num_arms()
            )));
        }
        for members in partition.clusters() {
            let (lo, hi) = members
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &a| {
                    (lo.min(row[a]), hi.max(row[a]))
                });
            ell = ell.max(hi - lo);
        }
    }
    Ok(ell)
}
