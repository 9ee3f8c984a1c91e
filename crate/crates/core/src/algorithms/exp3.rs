use std::f64::consts::E;

use crate::error::{BanditError, Result};
use crate::policy::{check_arm, check_arm_count, Policy};
use crate::rng::{sample_categorical, RngStream};
use crate::{ArmIndex, Reward};

/// Exploration rate `min(1, sqrt(k ln k / ((e - 1) T)))`.
///
/// `horizon` is real-valued so that child policies can be tuned for their
/// expected share `T / p` of the rounds.
pub fn exp3_gamma(k: usize, horizon: f64) -> Result<f64> {
    if k == 0 {
        return Err(BanditError::InvalidArgument(
            "exp3_gamma: k must be >= 1".into(),
        ));
    }
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(BanditError::InvalidArgument(format!(
            "exp3_gamma: horizon must be positive, got {horizon}"
        )));
    }
    let k = k as f64;
    Ok((k * k.ln() / ((E - 1.0) * horizon)).sqrt().min(1.0))
}

/// EXP3 with weights kept in the log domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Exp3 {
    gamma: f64,
    log_weights: Vec<f64>,
    rng: RngStream,
    last: Option<(ArmIndex, f64)>,
    touched: u64,
}

impl Exp3 {
    pub fn new(k: usize, gamma: f64, rng: RngStream) -> Result<Self> {
        Self::from_log_weights(vec![0.0; k], gamma, rng)
    }

    pub fn from_log_weights(log_weights: Vec<f64>, gamma: f64, rng: RngStream) -> Result<Self> {
        check_arm_count(log_weights.len())?;
        if !(0.0..=1.0).contains(&gamma) {
            return Err(BanditError::range("exp3 gamma", gamma, 0.0, 1.0));
        }
        if let Some(w) = log_weights.iter().find(|w| !w.is_finite()) {
            return Err(BanditError::InvalidArgument(format!(
                "non-finite log-weight {w}"
            )));
        }
        Ok(Exp3 {
            gamma,
            log_weights,
            rng,
            last: None,
            touched: 0,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    /// `(1 - gamma) * w_i / sum(w) + gamma / k`, evaluated with the maximum
    /// log-weight subtracted.
    pub fn mixture(&self) -> Vec<f64> {
        let k = self.log_weights.len() as f64;
        let max = self
            .log_weights
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let scaled: Vec<f64> = self.log_weights.iter().map(|w| (w - max).exp()).collect();
        let total: f64 = scaled.iter().sum();
        scaled
            .into_iter()
            .map(|w| (1.0 - self.gamma) * w / total + self.gamma / k)
            .collect()
    }

    /// Importance-weighted exponential update of the played arm.
    pub fn update_with_probability(
        &mut self,
        arm: ArmIndex,
        reward: Reward,
        p_arm: f64,
    ) -> Result<()> {
        check_arm(arm, self.log_weights.len())?;
        if !(p_arm > 0.0) || p_arm > 1.0 + 1e-9 {
            return Err(BanditError::InvalidProbability(p_arm));
        }
        let k = self.log_weights.len() as f64;
        self.log_weights[arm] += self.gamma * (reward.get() / p_arm) / k;
        Ok(())
    }
}

impl Policy for Exp3 {
    fn num_arms(&self) -> usize {
        self.log_weights.len()
    }

    fn select(&mut self) -> Result<ArmIndex> {
        let k = self.log_weights.len();
        self.touched += k as u64;
        if k == 1 {
            self.last = Some((0, 1.0));
            return Ok(0);
        }
        let probs = self.mixture();
        let arm = sample_categorical(&probs, &mut self.rng)?;
        self.last = Some((arm, probs[arm]));
        Ok(arm)
    }

    fn probabilities(&self) -> Result<Vec<f64>> {
        Ok(self.mixture())
    }

    fn update(&mut self, arm: ArmIndex, reward: Reward) -> Result<()> {
        let p_arm = match self.last.take() {
            Some((a, p)) if a == arm => p,
            _ => {
                check_arm(arm, self.log_weights.len())?;
                self.mixture()[arm]
            }
        };
        self.update_with_probability(arm, reward, p_arm)
    }

    fn entries_touched(&self) -> u64 {
        self.touched
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rng() -> RngStream {
        RngStream::from_seed(11)
    }

    #[test]
    fn gamma_schedule() {
        assert_eq!(exp3_gamma(100, 1.0).unwrap(), 1.0);
        assert_eq!(exp3_gamma(1, 1000.0).unwrap(), 0.0);
        // sqrt(256 ln 256 / ((e - 1) 1e6)), evaluated independently with mpmath
        assert!((exp3_gamma(256, 1e6).unwrap() - 0.028_742_894_977).abs() < 1e-10);
        assert!(exp3_gamma(0, 10.0).is_err());
        assert!(exp3_gamma(4, 0.0).is_err());
    }

    #[test]
    fn mixture_examples() {
        let p = Exp3::new(4, 0.2, rng()).unwrap().mixture();
        for x in p {
            assert!((x - 0.25).abs() < 1e-15);
        }
        let e = Exp3::from_log_weights(vec![3f64.ln(), 0.0], 0.0, rng()).unwrap();
        let p = e.mixture();
        assert!((p[0] - 0.75).abs() < 1e-12 && (p[1] - 0.25).abs() < 1e-12);
        let e = Exp3::from_log_weights(vec![5.0, -2.0, 0.3], 1.0, rng()).unwrap();
        for x in e.mixture() {
            assert!((x - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn update_increments_log_weight() {
        let mut e = Exp3::new(2, 0.1, rng()).unwrap();
        e.update_with_probability(0, Reward::ONE, 0.5).unwrap();
        assert!((e.log_weights()[0] - 0.1).abs() < 1e-15);
        assert_eq!(e.log_weights()[1], 0.0);
        assert!((e.log_weights()[0].exp() - 1.105_170_918).abs() < 1e-9);

        let before = e.clone();
        e.update_with_probability(1, Reward::ZERO, 0.5).unwrap();
        assert_eq!(e, before);

        assert!(matches!(
            e.update_with_probability(0, Reward::ONE, 0.0),
            Err(BanditError::InvalidProbability(_))
        ));
    }

    #[test]
    fn stays_finite_under_long_one_sided_runs() {
        let gamma = 0.05;
        let mut e = Exp3::new(8, gamma, rng()).unwrap();
        for _ in 0..10_000_000 {
            // arm 0 dominates, so its selection probability is ~(1 - gamma)
            e.update_with_probability(0, Reward::ONE, 1.0 - gamma + gamma / 8.0)
                .unwrap();
        }
        let probs = e.mixture();
        assert!(probs
            .iter()
            .all(|p| p.is_finite() && *p >= gamma / 8.0 - 1e-15));
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn single_arm_never_draws() {
        let mut e = Exp3::new(1, 0.0, rng()).unwrap();
        for _ in 0..5 {
            assert_eq!(e.select().unwrap(), 0);
            e.update(0, Reward::ONE).unwrap();
        }
        assert_eq!(e.rng, rng());
    }
}
