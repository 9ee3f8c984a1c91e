use crate::error::{BanditError, Result};
use crate::partition::features::{squared_distance, ArmFeatures};
use crate::partition::Partition;
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansOptions {
    pub max_iterations: usize,
    /// Stop once no centroid moves further than this.
    pub tolerance: f64,
}

impl Default for KMeansOptions {
    fn default() -> Self {
        KMeansOptions {
            max_iterations: 100,
            tolerance: 1e-9,
        }
    }
}

fn nearest(point: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, centroid) in centroids.iter().enumerate() {
        let d = squared_distance(point, centroid);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn plus_plus_seeds(features: &ArmFeatures, p: usize, rng: &mut RngStream) -> Vec<Vec<f64>> {
    let n = features.len();
    let first = ((rng.uniform() * n as f64) as usize).min(n - 1);
    let mut chosen = vec![first];
    let mut dist: Vec<f64> = features
        .points()
        .iter()
        .map(|x| squared_distance(x, features.point(first)))
        .collect();
    while chosen.len() < p {
        let total: f64 = dist.iter().sum();
        let next = if total > 0.0 {
            let target = rng.uniform() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &d) in dist.iter().enumerate() {
                if d > 0.0 {
                    acc += d;
                    pick = Some(i);
                    if target < acc {
                        break;
                    }
                }
            }
            pick.expect("positive total implies a positive entry")
        } else {
            // every remaining point coincides with a seed
            (0..n).find(|i| !chosen.contains(i)).expect("p <= n")
        };
        chosen.push(next);
        for (d, x) in dist.iter_mut().zip(features.points()) {
            *d = d.min(squared_distance(x, features.point(next)));
        }
    }
    chosen
        .into_iter()
        .map(|i| features.point(i).to_vec())
        .collect()
}

/// Lloyd's algorithm with k-means++ seeding.
///
/// Empty clusters are re-seeded with the point farthest from its centroid.
/// Clusters are ordered by their smallest arm index.
pub fn kmeans_partition(
    features: &ArmFeatures,
    p: usize,
    rng: &mut RngStream,
    options: KMeansOptions,
) -> Result<Partition> {
    let n = features.len();
    if p == 0 || p > n {
        return Err(BanditError::Structure(format!(
            "cannot form {p} clusters from {n} arms"
        )));
    }
    let mut centroids = plus_plus_seeds(features, p, rng);
    let mut labels = vec![0usize; n];
    let dim = features.dim();

    for _ in 0..options.max_iterations {
        let mut far: Vec<(usize, f64)> = Vec::with_capacity(n);
        for (i, x) in features.points().iter().enumerate() {
            let (c, d) = nearest(x, &centroids);
            labels[i] = c;
            far.push((i, d));
        }
        reseed_empty(&mut labels, &mut centroids, features, &mut far);

        let mut sums = vec![vec![0.0; dim]; p];
        let mut counts = vec![0usize; p];
        for (x, &c) in features.points().iter().zip(&labels) {
            counts[c] += 1;
            for (s, v) in sums[c].iter_mut().zip(x) {
                *s += v;
            }
        }
        let mut shift: f64 = 0.0;
        for c in 0..p {
            let updated: Vec<f64> = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            shift = shift.max(squared_distance(&updated, &centroids[c]).sqrt());
            centroids[c] = updated;
        }
        if shift < options.tolerance {
            break;
        }
    }

    // final assignment against the converged centroids
    let mut far = Vec::with_capacity(n);
    for (i, x) in features.points().iter().enumerate() {
        let (c, d) = nearest(x, &centroids);
        labels[i] = c;
        far.push((i, d));
    }
    reseed_empty(&mut labels, &mut centroids, features, &mut far);

    let mut clusters = vec![Vec::new(); p];
    for (arm, &c) in labels.iter().enumerate() {
        clusters[c].push(arm);
    }
    clusters.sort_by_key(|members| members[0]);
    Partition::new(clusters)
}

/// Moves the farthest points (from clusters that can spare one) into empty
/// clusters.
fn reseed_empty(
    labels: &mut [usize],
    centroids: &mut [Vec<f64>],
    features: &ArmFeatures,
    far: &mut [(usize, f64)],
) {
    let p = centroids.len();
    let mut counts = vec![0usize; p];
    for &c in labels.iter() {
        counts[c] += 1;
    }
    if counts.iter().all(|&c| c > 0) {
        return;
    }
    // farthest first, ties by lowest index
    far.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut donors = far.iter().map(|&(i, _)| i);
    for c in 0..p {
        if counts[c] > 0 {
            continue;
        }
        for i in donors.by_ref() {
            let from = labels[i];
            if counts[from] > 1 {
                counts[from] -= 1;
                labels[i] = c;
                counts[c] = 1;
                centroids[c] = features.point(i).to_vec();
                break;
            }
        }
    }
}
