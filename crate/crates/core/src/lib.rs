//! Hierarchical adversarial bandits: a parent policy chooses a cluster of
//! arms, and that cluster's child policy chooses the arm to pull.
//!
//! The crate provides the flat policies ([`Exp3`], [`TsallisInf`], [`Ucb1`]),
//! the two-level composite ([`Abob`]), arm partitioning schemes, the
//! simulation environments and an experiment runner that measures regret
//! against the best fixed arm in hindsight.
//!
//! ```
//! use abob_core::environments::{Environment, RewardKind, StationaryEnv};
//! use abob_core::partition::round_robin_partition;
//! use abob_core::{Abob, Label, PolicyKind, PolicyParams, RngStream};
//!
//! # fn main() -> abob_core::Result<()> {
//! let rng = RngStream::from_seed(1);
//! let mut env = StationaryEnv::new(vec![0.2, 0.4, 0.6, 0.8], RewardKind::Bernoulli, rng.derive(Label::Env))?;
//! let partition = round_robin_partition(4, 2)?;
//! let mut abob = Abob::new(partition, PolicyKind::Exp3, PolicyKind::TsallisInf, 1000, &PolicyParams::default(), &rng)?;
//! for t in 0..1000 {
//!     if t > 0 {
//!         env.advance()?;
//!     }
//!     let step = abob.step(&env)?;
//!     assert_eq!(abob.partition().cluster_of(step.arm), step.cluster);
//! }
//! # Ok(())
//! # }
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algorithms;
pub mod environments;
mod error;
pub mod hierarchy;
pub mod partition;
pub mod policy;
mod reward;
pub mod rng;
pub mod runner;

pub use algorithms::{exp3_gamma, Exp3, TsallisInf, Ucb1};
pub use error::{BanditError, Result};
pub use hierarchy::{ell_of_partition, Abob, StepRecord};
pub use partition::Partition;
pub use policy::{AnyPolicy, Policy, PolicyKind, PolicyParams};
pub use reward::{loss_from_reward, ArmIndex, Reward};
pub use rng::{sample_categorical, Label, RngStream};
