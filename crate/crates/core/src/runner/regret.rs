use crate::error::{BanditError, Result};
use crate::ArmIndex;

/// Streaming regret against the best fixed arm in hindsight:
/// `r(tau) = max_a sum_{t <= tau} c_t(a) - sum_{t <= tau} c_t(a_t)`.
#[derive(Debug, Clone)]
pub struct RegretTracker {
    totals: Vec<f64>,
    collected: f64,
}

impl RegretTracker {
    pub fn new(k: usize) -> Self {
        RegretTracker {
            totals: vec![0.0; k],
            collected: 0.0,
        }
    }

    /// Adds one round and returns the regret so far. `gain` is what the
    /// algorithm is credited with: the mean of the played arm, or its
    /// realized reward.
    pub fn push(&mut self, means: &[f64], gain: f64) -> Result<f64> {
        if means.len() != self.totals.len() {
            return Err(BanditError::Data(format!(
                "{} means for {} arms",
                means.len(),
                self.totals.len()
            )));
        }
        let mut best = f64::NEG_INFINITY;
        for (total, &m) in self.totals.iter_mut().zip(means) {
            *total += m;
            best = best.max(*total);
        }
        self.collected += gain;
        Ok(best - self.collected)
    }

    /// Per-arm sums of the means seen so far.
    pub fn mean_totals(&self) -> &[f64] {
        &self.totals
    }

    pub fn into_mean_totals(self) -> Vec<f64> {
        self.totals
    }
}

/// Regret series of the arm sequence `arms` under per-round mean vectors.
pub fn cumulative_regret<'a, I>(mean_rows: I, arms: &[ArmIndex]) -> Result<Vec<f64>>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let mut rows = mean_rows.into_iter();
    let mut tracker: Option<RegretTracker> = None;
    let mut series = Vec::with_capacity(arms.len());
    for (t, &arm) in arms.iter().enumerate() {
        let row = rows
            .next()
            .ok_or_else(|| BanditError::Data(format!("no means for round {t}")))?;
        let tracker = tracker.get_or_insert_with(|| RegretTracker::new(row.len()));
        let gain = *row
            .get(arm)
            .ok_or_else(|| BanditError::Data(format!("no mean for arm {arm} at round {t}")))?;
        series.push(tracker.push(row, gain)?);
    }
    Ok(series)
}
