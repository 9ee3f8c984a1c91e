use serde::{Deserialize, Serialize};

use crate::error::{BanditError, Result};

/// Position of an arm within its context (a flat policy, or one cluster).
pub type ArmIndex = usize;

/// A reward in `[0, 1]`.
///
/// Environments validate rewards once when they are produced; policies
/// trust the value.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Reward(f64);

impl Reward {
    pub const ZERO: Reward = Reward(0.0);
    pub const ONE: Reward = Reward(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Reward(value))
        } else {
            Err(BanditError::range("reward", value, 0.0, 1.0))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Reward {
    type Error = BanditError;

    fn try_from(value: f64) -> Result<Self> {
        Reward::new(value)
    }
}

impl From<Reward> for f64 {
    fn from(r: Reward) -> f64 {
        r.0
    }
}

/// Converts a gain into the loss consumed by loss-based policies.
pub fn loss_from_reward(r: f64) -> Result<f64> {
    Ok(1.0 - Reward::new(r)?.get())
}
