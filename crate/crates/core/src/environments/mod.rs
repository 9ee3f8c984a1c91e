//! Reward generators.
//!
//! An environment exposes the full mean vector of the current round before
//! any arm is pulled, and the round's randomness is drawn when the round
//! starts. The realized reward of an arm is therefore a function of
//! `(round, seed, arm)` only, which keeps every environment an oblivious
//! adversary.

mod draw;
mod grid;
mod phased;
mod stationary;
mod trace;
mod traveling;

pub use draw::{draw_reward, RewardKind};
pub use grid::{grid_root, ArmGrid};
pub use phased::{phased_adversarial_means, phased_pair, PhasedEnv};
pub use stationary::{clustered_gap_means, stochastic_gap_means, StationaryEnv};
pub use trace::{load_features_csv, trace_mean, RewardTrace, TraceEnv};
pub use traveling::{random_walk_advance, traveling_mean, TravelingEnv, TravelingState};

use crate::error::Result;
use crate::{ArmIndex, Reward};

pub trait Environment {
    fn num_arms(&self) -> usize;

    /// Zero-based index of the current round.
    fn round(&self) -> u64;

    /// Expected reward of every arm in the current round.
    fn means(&self) -> &[f64];

    /// Realized reward of `arm` in the current round.
    fn pull(&self, arm: ArmIndex) -> Result<Reward>;

    /// Moves to the next round.
    fn advance(&mut self) -> Result<()>;
}

impl<E: Environment + ?Sized> Environment for Box<E> {
    fn num_arms(&self) -> usize {
        (**self).num_arms()
    }

    fn round(&self) -> u64 {
        (**self).round()
    }

    fn means(&self) -> &[f64] {
        (**self).means()
    }

    fn pull(&self, arm: ArmIndex) -> Result<Reward> {
        (**self).pull(arm)
    }

    fn advance(&mut self) -> Result<()> {
        (**self).advance()
    }
}

pub(crate) fn arm_mean(means: &[f64], arm: ArmIndex) -> Result<f64> {
    means.get(arm).copied().ok_or_else(|| {
        crate::BanditError::InvalidArgument(format!(
            "arm {arm} out of range for {} arms",
            means.len()
        ))
    })
}
