//! The select-then-update contract shared by every bandit algorithm.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algorithms::{exp3_gamma, Exp3, TsallisInf, Ucb1};
use crate::error::{BanditError, Result};
use crate::rng::RngStream;
use crate::{ArmIndex, Reward};

/// A bandit algorithm over `num_arms()` arms.
///
/// Callers alternate `select` and `update`, passing back the arm that was
/// just selected. Policies own their random stream.
pub trait Policy {
    fn num_arms(&self) -> usize;

    fn select(&mut self) -> Result<ArmIndex>;

    /// Current selection distribution over the arms.
    fn probabilities(&self) -> Result<Vec<f64>>;

    fn update(&mut self, arm: ArmIndex, reward: Reward) -> Result<()>;

    /// Number of per-arm probability (or index) entries computed so far.
    fn entries_touched(&self) -> u64;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PolicyKind {
    #[serde(rename = "exp3")]
    Exp3,
    #[serde(rename = "tsallis")]
    TsallisInf,
    #[serde(rename = "ucb1")]
    Ucb1,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 3] = [PolicyKind::Exp3, PolicyKind::TsallisInf, PolicyKind::Ucb1];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Exp3 => "exp3",
            PolicyKind::TsallisInf => "tsallis",
            PolicyKind::Ucb1 => "ucb1",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = BanditError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exp3" => Ok(PolicyKind::Exp3),
            "tsallis" | "tsallis-inf" | "tsallis_inf" => Ok(PolicyKind::TsallisInf),
            "ucb1" | "ucb" => Ok(PolicyKind::Ucb1),
            other => Err(BanditError::Config(format!(
                "unknown algorithm {other:?} (expected exp3, tsallis or ucb1)"
            ))),
        }
    }
}

/// Tunables that are not derived from the arm count and horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolicyParams {
    pub ucb_alpha: f64,
}

impl Default for PolicyParams {
    fn default() -> Self {
        PolicyParams {
            ucb_alpha: std::f64::consts::SQRT_2,
        }
    }
}

/// Closed set of policies, so composites stay `Clone + PartialEq`.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyPolicy {
    Exp3(Exp3),
    TsallisInf(TsallisInf),
    Ucb1(Ucb1),
}

impl AnyPolicy {
    /// Builds a policy over `k` arms expected to be played about `horizon`
    /// times. EXP3 takes its exploration rate from [`exp3_gamma`].
    pub fn new(
        kind: PolicyKind,
        k: usize,
        horizon: f64,
        params: &PolicyParams,
        rng: RngStream,
    ) -> Result<Self> {
        Ok(match kind {
            PolicyKind::Exp3 => AnyPolicy::Exp3(Exp3::new(k, exp3_gamma(k, horizon)?, rng)?),
            PolicyKind::TsallisInf => AnyPolicy::TsallisInf(TsallisInf::new(k, rng)?),
            PolicyKind::Ucb1 => AnyPolicy::Ucb1(Ucb1::new(k, params.ucb_alpha)?),
        })
    }

    pub fn kind(&self) -> PolicyKind {
        match self {
            AnyPolicy::Exp3(_) => PolicyKind::Exp3,
            AnyPolicy::TsallisInf(_) => PolicyKind::TsallisInf,
            AnyPolicy::Ucb1(_) => PolicyKind::Ucb1,
        }
    }
}

macro_rules! dispatch {
    ($self:ident, $p:ident => $e:expr) => {
        match $self {
            AnyPolicy::Exp3($p) => $e,
            AnyPolicy::TsallisInf($p) => $e,
            AnyPolicy::Ucb1($p) => $e,
        }
    };
}

impl Policy for AnyPolicy {
    fn num_arms(&self) -> usize {
        dispatch!(self, p => p.num_arms())
    }

    fn select(&mut self) -> Result<ArmIndex> {
        dispatch!(self, p => p.select())
    }

    fn probabilities(&self) -> Result<Vec<f64>> {
        dispatch!(self, p => p.probabilities())
    }

    fn update(&mut self, arm: ArmIndex, reward: Reward) -> Result<()> {
        dispatch!(self, p => p.update(arm, reward))
    }

    fn entries_touched(&self) -> u64 {
        dispatch!(self, p => p.entries_touched())
    }
}

pub(crate) fn check_arm(arm: ArmIndex, k: usize) -> Result<()> {
    if arm < k {
        Ok(())
    } else {
        Err(BanditError::InvalidArgument(format!(
            "arm {arm} out of range for {k} arms"
        )))
    }
}

pub(crate) fn check_arm_count(k: usize) -> Result<()> {
    if k == 0 {
        Err(BanditError::InvalidArgument(
            "a policy needs at least one arm".into(),
        ))
    } else {
        Ok(())
    }
}
