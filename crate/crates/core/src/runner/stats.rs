use serde::Serialize;
use statrs::function::beta::beta_reg;

use crate::error::{BanditError, Result};

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample variance with `n - 1` in the denominator; 0 for fewer than two
/// values.
pub fn sample_variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

pub fn sample_std(xs: &[f64]) -> f64 {
    sample_variance(xs).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WelchResult {
    pub t: f64,
    pub df: f64,
    pub p_value: f64,
}

/// Two-sided Welch t-test for unequal variances.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<WelchResult> {
    if a.len() < 2 || b.len() < 2 {
        return Err(BanditError::Statistics(format!(
            "Welch's test needs two samples of size >= 2 (got {} and {})",
            a.len(),
            b.len()
        )));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (sa, sb) = (sample_variance(a) / na, sample_variance(b) / nb);
    let se2 = sa + sb;
    if !(se2 > 0.0) {
        return Err(BanditError::Statistics(
            "both samples have zero variance".into(),
        ));
    }
    let t = (mean(a) - mean(b)) / se2.sqrt();
    let df = se2 * se2 / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    let p_value = if t == 0.0 {
        1.0
    } else {
        beta_reg(0.5 * df, 0.5, df / (df + t * t)).clamp(0.0, 1.0)
    };
    Ok(WelchResult { t, df, p_value })
}
