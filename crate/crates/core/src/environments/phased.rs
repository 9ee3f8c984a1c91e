use crate::environments::{arm_mean, Environment, RewardKind};
use crate::error::{BanditError, Result};
use crate::rng::RngStream;
use crate::{ArmIndex, Reward};

/// Index of the phase containing step `t`. Phase `m` covers
/// `[base * (2^m - 1), base * (2^(m+1) - 1))`.
fn phase_of(t: u64, base_phase: u64) -> u32 {
    let mut m = 0u32;
    // start of phase m + 1 is base * (2^(m+1) - 1)
    while (base_phase as u128) * ((1u128 << (m + 1)) - 1) <= t as u128 {
        m += 1;
    }
    m
}

/// `(optimal, suboptimal)` means at step `t`: `(delta, 0)` in even phases,
/// `(1, 1 - delta)` in odd ones.
pub fn phased_pair(t: u64, delta: f64, base_phase: u64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(BanditError::range("gap", delta, 0.0, 1.0));
    }
    if base_phase == 0 {
        return Err(BanditError::InvalidArgument(
            "phase length must be >= 1".into(),
        ));
    }
    Ok(if phase_of(t, base_phase).is_multiple_of(2) {
        (delta, 0.0)
    } else {
        (1.0, 1.0 - delta)
    })
}

pub fn phased_adversarial_means(
    k: usize,
    t: u64,
    delta: f64,
    best: ArmIndex,
    base_phase: u64,
) -> Result<Vec<f64>> {
    if best >= k {
        return Err(BanditError::InvalidArgument(format!(
            "best arm {best} out of range for {k} arms"
        )));
    }
    let (hi, lo) = phased_pair(t, delta, base_phase)?;
    let mut means = vec![lo; k];
    means[best] = hi;
    Ok(means)
}

/// Fixed optimal arm whose level switches in exponentially growing phases.
#[derive(Debug, Clone)]
pub struct PhasedEnv {
    k: usize,
    delta: f64,
    best: ArmIndex,
    base_phase: u64,
    kind: RewardKind,
    rng: RngStream,
    means: Vec<f64>,
    u: f64,
    round: u64,
}

impl PhasedEnv {
    pub fn new(
        k: usize,
        delta: f64,
        best: ArmIndex,
        base_phase: u64,
        kind: RewardKind,
        mut rng: RngStream,
    ) -> Result<Self> {
        let means = phased_adversarial_means(k, 0, delta, best, base_phase)?;
        kind.check_support(0.0, 1.0)?;
        let u = rng.uniform();
        Ok(PhasedEnv {
            k,
            delta,
            best,
            base_phase,
            kind,
            rng,
            means,
            u,
            round: 0,
        })
    }
}

impl Environment for PhasedEnv {
    fn num_arms(&self) -> usize {
        self.k
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
        let (hi, lo) = phased_pair(self.round, self.delta, self.base_phase)?;
        if self.means[self.best] != hi {
            self.means.fill(lo);
            self.means[self.best] = hi;
        }
        self.u = self.rng.uniform();
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phase_boundaries() {
        assert_eq!(phased_pair(0, 0.1, 50).unwrap(), (0.1, 0.0));
        assert_eq!(phased_pair(49, 0.1, 50).unwrap(), (0.1, 0.0));
        assert_eq!(phased_pair(50, 0.1, 50).unwrap(), (1.0, 0.9));
        assert_eq!(phased_pair(149, 0.1, 50).unwrap(), (1.0, 0.9));
        assert_eq!(phased_pair(150, 0.1, 50).unwrap(), (0.1, 0.0));
        assert_eq!(phased_pair(349, 0.1, 50).unwrap(), (0.1, 0.0));
        assert_eq!(phased_pair(350, 0.1, 50).unwrap(), (1.0, 0.9));
    }

    #[test]
    fn gap_is_constant() {
        for t in (0..1_000_000).step_by(997) {
            let (hi, lo) = phased_pair(t, 0.1, 50).unwrap();
            assert!((hi - lo - 0.1).abs() < 1e-12);
        }
    }

    #[test]
    fn environment_tracks_phases() {
        let mut env =
            PhasedEnv::new(4, 0.2, 2, 3, RewardKind::Bernoulli, RngStream::from_seed(1)).unwrap();
        for t in 0..100 {
            let want = phased_adversarial_means(4, t, 0.2, 2, 3).unwrap();
            assert_eq!(env.means(), want.as_slice());
            env.advance().unwrap();
        }
    }
}
