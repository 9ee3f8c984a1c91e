use serde::{Deserialize, Serialize};

use crate::error::{BanditError, Result};
use crate::rng::RngStream;
use crate::Reward;

/// How a realized reward is drawn around its mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RewardKind {
    #[default]
    Bernoulli,
    /// Uniform on `[mean - width/2, mean + width/2]`.
    Uniform { width: f64 },
    /// The mean itself, used when replaying recorded rewards.
    Exact,
}

impl RewardKind {
    /// Maps one uniform draw `u` in `[0, 1)` to a reward with the given mean.
    pub fn realize(self, mean: f64, u: f64) -> Result<Reward> {
        match self {
            RewardKind::Bernoulli => {
                let mean = Reward::new(mean)?.get();
                Ok(if u < mean { Reward::ONE } else { Reward::ZERO })
            }
            RewardKind::Uniform { width } => {
                if !(width >= 0.0) {
                    return Err(BanditError::range("uniform reward width", width, 0.0, 1.0));
                }
                let (lo, hi) = (mean - 0.5 * width, mean + 0.5 * width);
                if lo < -1e-12 || hi > 1.0 + 1e-12 {
                    return Err(BanditError::Range {
                        what: "uniform reward support",
                        value: if lo < 0.0 { lo } else { hi },
                        lo: 0.0,
                        hi: 1.0,
                    });
                }
                Reward::new((lo + u * width).clamp(0.0, 1.0))
            }
            RewardKind::Exact => Reward::new(mean),
        }
    }

    /// Checks that every mean in `[lo, hi]` produces rewards inside `[0, 1]`.
    pub fn check_support(self, lo: f64, hi: f64) -> Result<()> {
        self.realize(lo, 0.0)?;
        self.realize(hi, 0.0)?;
        Ok(())
    }
}

/// Draws one reward, consuming exactly one uniform from `rng`.
pub fn draw_reward(mean: f64, kind: RewardKind, rng: &mut RngStream) -> Result<Reward> {
    kind.realize(mean, rng.uniform())
}
