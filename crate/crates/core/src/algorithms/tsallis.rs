//! Tsallis-INF with the 1/2-Tsallis regulariser and importance-weighted
//! loss estimates.

use crate::error::{BanditError, Result};
use crate::policy::{check_arm, check_arm_count, Policy};
use crate::rng::{sample_categorical, RngStream};
use crate::{ArmIndex, Reward};

const MAX_ITERATIONS: usize = 200;
const SUM_TOLERANCE: f64 = 1e-12;

/// Normalised weights `p_i = 4 (eta (L_i - x))^-2` with `sum(p) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TsallisSolution {
    pub x: f64,
    pub probabilities: Vec<f64>,
    pub iterations: usize,
}

/// Finds the normalisation scalar `x < min(L)` by Newton's method,
/// falling back to bisection whenever a step leaves the bracket.
///
/// `sum_i 4 (eta (L_i - x))^-2` is increasing and convex in `x`, equals at
/// most 1 at `min(L) - 2 sqrt(k) / eta` and diverges at `min(L)`.
pub fn solve_tsallis_normalization(losses: &[f64], eta: f64) -> Result<TsallisSolution> {
    check_arm_count(losses.len())?;
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(BanditError::InvalidArgument(format!("learning rate {eta}")));
    }
    let k = losses.len();
    if k == 1 {
        return Ok(TsallisSolution {
            x: losses[0] - 2.0 / eta,
            probabilities: vec![1.0],
            iterations: 0,
        });
    }
    let min = losses.iter().copied().fold(f64::INFINITY, f64::min);
    let mut lo = min - 2.0 * (k as f64).sqrt() / eta;
    let mut hi = min;
    let mut x = lo;

    let eval = |x: f64| {
        let mut sum = 0.0;
        let mut slope = 0.0;
        for &l in losses {
            let gap = eta * (l - x);
            let p = 4.0 / (gap * gap);
            sum += p;
            slope += 2.0 * eta * p / gap;
        }
        (sum - 1.0, slope)
    };

    for iteration in 0..MAX_ITERATIONS {
        let (f, slope) = eval(x);
        if f.abs() <= SUM_TOLERANCE {
            return Ok(TsallisSolution {
                x,
                probabilities: losses
                    .iter()
                    .map(|&l| 4.0 / (eta * (l - x)).powi(2))
                    .collect(),
                iterations: iteration,
            });
        }
        if f < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - f / slope;
        x = if newton > lo && newton < hi {
            newton
        } else {
            lo + 0.5 * (hi - lo)
        };
        if !(x > lo && x < hi) {
            // bracket exhausted at floating-point resolution
            break;
        }
    }
    Err(BanditError::Numerical(format!(
        "Tsallis normalisation did not converge in {MAX_ITERATIONS} iterations (k = {k}, eta = {eta})"
    )))
}

/// Tsallis-INF with learning rate `eta_t = eta_scale / sqrt(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TsallisInf {
    cumulative_loss: Vec<f64>,
    t: u64,
    eta_scale: f64,
    rng: RngStream,
    last: Option<(ArmIndex, f64)>,
    touched: u64,
}

impl TsallisInf {
    pub const DEFAULT_ETA_SCALE: f64 = 1.0;

    pub fn new(k: usize, rng: RngStream) -> Result<Self> {
        Self::with_eta_scale(k, Self::DEFAULT_ETA_SCALE, rng)
    }

    pub fn with_eta_scale(k: usize, eta_scale: f64, rng: RngStream) -> Result<Self> {
        check_arm_count(k)?;
        if !(eta_scale > 0.0) || !eta_scale.is_finite() {
            return Err(BanditError::InvalidArgument(format!(
                "eta scale {eta_scale}"
            )));
        }
        Ok(TsallisInf {
            cumulative_loss: vec![0.0; k],
            t: 1,
            eta_scale,
            rng,
            last: None,
            touched: 0,
        })
    }

    /// State with given cumulative loss estimates at round `t >= 1`.
    pub fn from_losses(cumulative_loss: Vec<f64>, t: u64, rng: RngStream) -> Result<Self> {
        let mut s = Self::new(cumulative_loss.len(), rng)?;
        if t == 0 {
            return Err(BanditError::InvalidArgument(
                "round counter starts at 1".into(),
            ));
        }
        if let Some(l) = cumulative_loss
            .iter()
            .find(|l| !(l.is_finite() && **l >= 0.0))
        {
            return Err(BanditError::InvalidArgument(format!("loss estimate {l}")));
        }
        s.cumulative_loss = cumulative_loss;
        s.t = t;
        Ok(s)
    }

    pub fn cumulative_loss(&self) -> &[f64] {
        &self.cumulative_loss
    }

    pub fn round(&self) -> u64 {
        self.t
    }

    pub fn learning_rate(&self) -> f64 {
        self.eta_scale / (self.t as f64).sqrt()
    }

    pub fn solve(&self) -> Result<TsallisSolution> {
        solve_tsallis_normalization(&self.cumulative_loss, self.learning_rate())
    }

    /// Adds the importance-weighted loss `(1 - reward) / p_arm` and advances
    /// the round counter.
    pub fn update_with_probability(
        &mut self,
        arm: ArmIndex,
        reward: Reward,
        p_arm: f64,
    ) -> Result<()> {
        check_arm(arm, self.cumulative_loss.len())?;
        if !(p_arm > 0.0) || p_arm > 1.0 + 1e-9 {
            return Err(BanditError::InvalidProbability(p_arm));
        }
        self.cumulative_loss[arm] += (1.0 - reward.get()) / p_arm;
        self.t += 1;
        Ok(())
    }
}

impl Policy for TsallisInf {
    fn num_arms(&self) -> usize {
        self.cumulative_loss.len()
    }

    fn select(&mut self) -> Result<ArmIndex> {
        let k = self.cumulative_loss.len();
        self.touched += k as u64;
        if k == 1 {
            self.last = Some((0, 1.0));
            return Ok(0);
        }
        let probs = self.solve()?.probabilities;
        let arm = sample_categorical(&probs, &mut self.rng)?;
        self.last = Some((arm, probs[arm]));
        Ok(arm)
    }

    fn probabilities(&self) -> Result<Vec<f64>> {
        Ok(self.solve()?.probabilities)
    }

    fn update(&mut self, arm: ArmIndex, reward: Reward) -> Result<()> {
        let p_arm = match self.last.take() {
            Some((a, p)) if a == arm => p,
            _ => {
                check_arm(arm, self.cumulative_loss.len())?;
                self.solve()?.probabilities[arm]
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
    use proptest::prelude::*;

    fn rng() -> RngStream {
        RngStream::from_seed(5)
    }

    /// Plain bisection on the normalisation equation, kept separate from the
    /// Newton solver.
    fn bisection_oracle(losses: &[f64], eta: f64) -> Vec<f64> {
        let min = losses.iter().copied().fold(f64::INFINITY, f64::min);
        let total = |x: f64| -> f64 { losses.iter().map(|l| 4.0 / (eta * (l - x)).powi(2)).sum() };
        let (mut lo, mut hi) = (min - 1e6, min);
        for _ in 0..400 {
            let mid = 0.5 * (lo + hi);
            if total(mid) < 1.0 {
                lo = mid
            } else {
                hi = mid
            }
        }
        losses
            .iter()
            .map(|l| 4.0 / (eta * (l - lo)).powi(2))
            .collect()
    }

    #[test]
    fn symmetric_losses_give_uniform() {
        let s = TsallisInf::new(2, rng()).unwrap();
        for p in s.probabilities().unwrap() {
            assert!((p - 0.5).abs() < 1e-15);
        }
        for t in [1, 7, 1000] {
            let s = TsallisInf::from_losses(vec![3.5; 4], t, rng()).unwrap();
            for p in s.probabilities().unwrap() {
                assert!((p - 0.25).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn large_loss_gap_concentrates_mass() {
        let s = TsallisInf::from_losses(vec![0.0, 100.0], 100, rng()).unwrap();
        let p = s.probabilities().unwrap();
        let oracle = bisection_oracle(&[0.0, 100.0], s.learning_rate());
        // bisection oracle with eta = 1/sqrt(100): p_0 = 0.972352476910513
        assert!((oracle[0] - 0.972_352_476_910_513).abs() < 1e-9);
        assert!((p[0] - oracle[0]).abs() < 1e-9);
        assert!(p[0] > 0.97);
    }

    #[test]
    fn update_accumulates_importance_weighted_loss() {
        let mut s = TsallisInf::new(3, rng()).unwrap();
        s.update_with_probability(1, Reward::ONE, 0.3).unwrap();
        assert_eq!(s.cumulative_loss(), &[0.0, 0.0, 0.0]);
        assert_eq!(s.round(), 2);
        s.update_with_probability(2, Reward::ZERO, 0.25).unwrap();
        assert_eq!(s.cumulative_loss(), &[0.0, 0.0, 4.0]);
        assert_eq!(s.round(), 3);
        assert!(s.update_with_probability(0, Reward::ZERO, 0.0).is_err());
    }

    #[test]
    fn symmetric_alternation_mirrors_across_orders() {
        let mut a = TsallisInf::new(2, rng()).unwrap();
        let mut b = TsallisInf::new(2, rng()).unwrap();
        for r in [0.3, 0.8, 0.1, 1.0, 0.55, 0.0] {
            let r = Reward::new(r).unwrap();
            for (s, order) in [(&mut a, [0, 1]), (&mut b, [1, 0])] {
                for arm in order {
                    let p = s.probabilities().unwrap()[arm];
                    s.update_with_probability(arm, r, p).unwrap();
                }
            }
            let (pa, pb) = (a.probabilities().unwrap(), b.probabilities().unwrap());
            assert!((pa[0] - pb[1]).abs() < 1e-12 && (pa[1] - pb[0]).abs() < 1e-12);
        }
        // identical losses on both arms restore the uniform distribution
        let even = TsallisInf::from_losses(vec![2.0, 2.0], a.round(), rng()).unwrap();
        for p in even.probabilities().unwrap() {
            assert!((p - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn newton_converges_on_extreme_states() {
        let cases: Vec<(Vec<f64>, u64)> = vec![
            (vec![0.0, 1e9], 1),
            (vec![1e7, 1e7 + 1e-9, 3e7], 10_000_000),
            ((0..256).map(|i| i as f64 * 1e3).collect(), 1_000_000),
            (vec![0.0; 1024], 1),
        ];
        for (losses, t) in cases {
            let s = TsallisInf::from_losses(losses.clone(), t, rng()).unwrap();
            let sol = s.solve().unwrap();
            assert!(sol.iterations < MAX_ITERATIONS);
            assert!((sol.probabilities.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        }
    }

    proptest! {
        #[test]
        fn solution_satisfies_stationarity(
            losses in prop::collection::vec(0.0f64..5_000.0, 2..40),
            t in 1u64..1_000_000,
        ) {
            let s = TsallisInf::from_losses(losses.clone(), t, rng()).unwrap();
            let eta = s.learning_rate();
            let sol = s.solve().unwrap();
            let residual: f64 = losses.iter().zip(&sol.probabilities)
                .map(|(l, p)| (p - 4.0 / (eta * (l - sol.x)).powi(2)).abs())
                .fold(0.0, f64::max);
            prop_assert!(residual <= 1e-9);
            prop_assert!((sol.probabilities.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
            prop_assert!(sol.probabilities.iter().all(|p| *p > 0.0));
            let oracle = bisection_oracle(&losses, eta);
            for (a, b) in oracle.iter().zip(&sol.probabilities) {
                prop_assert!((a - b).abs() < 1e-7);
            }
        }

        #[test]
        fn translation_invariant(
            losses in prop::collection::vec(0.0f64..1_000.0, 2..20),
            shift in 0.0f64..1_000.0,
            t in 1u64..100_000,
        ) {
            let a = TsallisInf::from_losses(losses.clone(), t, rng()).unwrap();
            let b = TsallisInf::from_losses(losses.iter().map(|l| l + shift).collect(), t, rng()).unwrap();
            let (pa, pb) = (a.probabilities().unwrap(), b.probabilities().unwrap());
            for (x, y) in pa.iter().zip(&pb) {
                prop_assert!((x - y).abs() < 1e-9);
            }
        }
    }
}
