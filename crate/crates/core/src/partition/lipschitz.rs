use crate::error::{BanditError, Result};
use crate::partition::features::{squared_distance, ArmFeatures};

pub const DEFAULT_NEIGHBORS: usize = 4;

/// Per-arm Lipschitz estimate: the mean of `|r_j - r_i| / |x_j - x_i|` over
/// the `n` nearest neighbours `j` of arm `i` (Euclidean, ties by index).
pub fn lipschitz_estimate(features: &ArmFeatures, rewards: &[f64], n: usize) -> Result<Vec<f64>> {
    let k = features.len();
    if rewards.len() != k {
        return Err(BanditError::InvalidArgument(format!(
            "{} rewards for {k} arms",
            rewards.len()
        )));
    }
    if n == 0 || n >= k {
        return Err(BanditError::InvalidArgument(format!(
            "neighbour count must be in [1, {}), got {n}",
            k
        )));
    }
    let mut out = Vec::with_capacity(k);
    let mut dists: Vec<(f64, usize)> = Vec::with_capacity(k - 1);
    for i in 0..k {
        dists.clear();
        for j in (0..k).filter(|&j| j != i) {
            let d = squared_distance(features.point(i), features.point(j)).sqrt();
            if d == 0.0 {
                return Err(BanditError::DegenerateGeometry(format!(
                    "arms {i} and {j} share a position"
                )));
            }
            dists.push((d, j));
        }
        dists.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let total: f64 = dists[..n]
            .iter()
            .map(|&(d, j)| (rewards[j] - rewards[i]).abs() / d)
            .sum();
        out.push(total / n as f64);
    }
    Ok(out)
}
