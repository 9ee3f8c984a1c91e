//! Grouping arms into clusters, and the empirical Lipschitz estimator.

mod features;
mod kmeans;
mod lipschitz;

pub use features::ArmFeatures;
pub use kmeans::{kmeans_partition, KMeansOptions};
pub use lipschitz::{lipschitz_estimate, DEFAULT_NEIGHBORS};

use std::fmt::Write as _;
use std::io::Read;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::environments::ArmGrid;
use crate::error::{BanditError, Result};
use crate::rng::RngStream;
use crate::ArmIndex;

/// Disjoint, non-empty clusters covering arms `0..k`.
///
/// The order of arms inside a cluster defines the child policy's local
/// indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    clusters: Vec<Vec<ArmIndex>>,
    cluster_of: Vec<usize>,
    local_of: Vec<usize>,
}

impl Partition {
    pub fn new(clusters: Vec<Vec<ArmIndex>>) -> Result<Self> {
        if clusters.is_empty() {
            return Err(BanditError::Structure(
                "a partition needs at least one cluster".into(),
            ));
        }
        let k: usize = clusters.iter().map(Vec::len).sum();
        let mut cluster_of = vec![usize::MAX; k];
        let mut local_of = vec![usize::MAX; k];
        for (c, members) in clusters.iter().enumerate() {
            if members.is_empty() {
                return Err(BanditError::Structure(format!("cluster {c} is empty")));
            }
            for (local, &arm) in members.iter().enumerate() {
                if arm >= k {
                    return Err(BanditError::Structure(format!(
                        "arm {arm} in cluster {c} is out of range for {k} arms"
                    )));
                }
                if cluster_of[arm] != usize::MAX {
                    return Err(BanditError::Structure(format!(
                        "arm {arm} appears in clusters {} and {c}",
                        cluster_of[arm]
                    )));
                }
                cluster_of[arm] = c;
                local_of[arm] = local;
            }
        }
        Ok(Partition {
            clusters,
            cluster_of,
            local_of,
        })
    }

    /// Builds a partition from a per-arm cluster label in `0..p`.
    pub fn from_labels(labels: &[usize]) -> Result<Self> {
        let p = labels.iter().max().map_or(0, |m| m + 1);
        let mut clusters = vec![Vec::new(); p];
        for (arm, &c) in labels.iter().enumerate() {
            clusters[c].push(arm);
        }
        Partition::new(clusters)
    }

    pub fn single(k: usize) -> Result<Self> {
        Partition::new(vec![(0..k).collect()])
    }

    pub fn num_arms(&self) -> usize {
        self.cluster_of.len()
    }

    pub fn num_clusters(&self) -> usize {
        self.clusters.len()
    }

    pub fn clusters(&self) -> &[Vec<ArmIndex>] {
        &self.clusters
    }

    pub fn cluster(&self, c: usize) -> &[ArmIndex] {
        &self.clusters[c]
    }

    pub fn cluster_of(&self, arm: ArmIndex) -> usize {
        self.cluster_of[arm]
    }

    /// Position of `arm` inside its cluster.
    pub fn local_index(&self, arm: ArmIndex) -> usize {
        self.local_of[arm]
    }

    pub fn global(&self, cluster: usize, local: usize) -> ArmIndex {
        self.clusters[cluster][local]
    }

    /// `arm,cluster` CSV, one row per arm in arm order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("arm,cluster\n");
        for (arm, c) in self.cluster_of.iter().enumerate() {
            let _ = writeln!(out, "{arm},{c}");
        }
        out
    }

    /// Reads `arm,cluster` CSV. Arms may appear in any order; within a
    /// cluster, local indices follow increasing arm index.
    pub fn from_csv_reader<R: Read>(reader: R, name: &str) -> Result<Self> {
        let parse_err = |line: usize, msg: String| BanditError::Parse {
            path: name.to_string(),
            line,
            msg,
        };
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(reader);
        let header = rdr
            .headers()
            .map_err(|e| parse_err(1, e.to_string()))?
            .clone();
        if header.iter().map(str::trim).collect::<Vec<_>>() != ["arm", "cluster"] {
            return Err(parse_err(1, "header must be arm,cluster".into()));
        }
        let mut pairs = Vec::new();
        for record in rdr.records() {
            let record = record.map_err(|e| {
                parse_err(
                    e.position().map(|p| p.line() as usize).unwrap_or(0),
                    e.to_string(),
                )
            })?;
            let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
            let field = |i: usize| -> Result<usize> {
                record[i].trim().parse().map_err(|_| {
                    parse_err(
                        line,
                        format!("{:?} is not a non-negative integer", &record[i]),
                    )
                })
            };
            pairs.push((field(0)?, field(1)?));
        }
        let k = pairs.len();
        let mut labels = vec![usize::MAX; k];
        for &(arm, c) in &pairs {
            if arm >= k || labels[arm] != usize::MAX {
                return Err(BanditError::Structure(format!(
                    "{name}: arm {arm} is duplicated or out of range for {k} rows"
                )));
            }
            labels[arm] = c;
        }
        Partition::from_labels(&labels)
    }
}

/// How to build a partition. `Grid` needs arm positions on a lattice,
/// `KMeans` needs per-arm features.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionMethod {
    Grid,
    #[serde(rename = "kmeans")]
    KMeans,
    Shuffled,
    RoundRobin,
}

fn require_divides(k: usize, p: usize) -> Result<()> {
    if p == 0 || !k.is_multiple_of(p) {
        return Err(BanditError::Structure(format!(
            "{p} clusters do not divide {k} arms evenly"
        )));
    }
    Ok(())
}

/// Arm `i` goes to cluster `i mod p`.
pub fn round_robin_partition(k: usize, p: usize) -> Result<Partition> {
    require_divides(k, p)?;
    Partition::new((0..p).map(|c| (c..k).step_by(p).collect()).collect())
}

/// A uniformly random permutation cut into `p` consecutive blocks of `k/p`.
pub fn shuffled_partition(k: usize, p: usize, rng: &mut RngStream) -> Result<Partition> {
    require_divides(k, p)?;
    let mut arms: Vec<ArmIndex> = (0..k).collect();
    arms.shuffle(rng);
    Partition::new(arms.chunks(k / p).map(<[usize]>::to_vec).collect())
}

/// Cluster counts `b^d` whose block side `b` divides the lattice side.
pub fn valid_grid_cluster_counts(grid: &ArmGrid) -> Vec<usize> {
    (1..=grid.side())
        .filter(|b| grid.side().is_multiple_of(*b))
        .map(|b| b.pow(grid.dim() as u32))
        .collect()
}

/// Equal-volume axis-aligned blocks of the lattice, ordered
/// lexicographically by block origin.
pub fn grid_partition(grid: &ArmGrid, p: usize) -> Result<Partition> {
    let per_axis = crate::environments::grid_root(p, grid.dim())
        .filter(|b| *b >= 1 && grid.side().is_multiple_of(*b))
        .ok_or_else(|| {
            BanditError::Structure(format!(
                "{p} clusters cannot tile a {}-dimensional lattice of {} arms; valid counts: {:?}",
                grid.dim(),
                grid.num_arms(),
                valid_grid_cluster_counts(grid)
            ))
        })?;
    let block = grid.side() / per_axis;
    let mut clusters = vec![Vec::new(); p];
    for arm in 0..grid.num_arms() {
        let c = grid
            .coordinates(arm)
            .iter()
            .fold(0, |acc, &coord| acc * per_axis + coord / block);
        clusters[c].push(arm);
    }
    Partition::new(clusters)
}
