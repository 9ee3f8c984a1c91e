use crate::environments::ArmGrid;
use crate::error::{BanditError, Result};

/// One parameter vector per arm, all of the same dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmFeatures {
    dim: usize,
    points: Vec<Vec<f64>>,
}

impl ArmFeatures {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        if points.is_empty() || dim == 0 {
            return Err(BanditError::InvalidArgument(
                "features need at least one arm and one dimension".into(),
            ));
        }
        if let Some((i, p)) = points.iter().enumerate().find(|(_, p)| p.len() != dim) {
            return Err(BanditError::InvalidArgument(format!(
                "arm {i} has {} features, expected {dim}",
                p.len()
            )));
        }
        if points.iter().flatten().any(|x| !x.is_finite()) {
            return Err(BanditError::InvalidArgument("non-finite feature".into()));
        }
        Ok(ArmFeatures { dim, points })
    }

    pub fn from_grid(grid: &ArmGrid) -> Self {
        ArmFeatures {
            dim: grid.dim(),
            points: grid.positions().to_vec(),
        }
    }

    /// Per-dimension min-max scaling to `[0, 1]`; constant dimensions map to 0.
    pub fn normalized(&self) -> Self {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for p in &self.points {
            for (j, &x) in p.iter().enumerate() {
                lo[j] = lo[j].min(x);
                hi[j] = hi[j].max(x);
            }
        }
        let points = self
            .points
            .iter()
            .map(|p| {
                p.iter()
                    .enumerate()
                    .map(|(j, &x)| {
                        let range = hi[j] - lo[j];
                        if range > 0.0 {
                            (x - lo[j]) / range
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        ArmFeatures {
            dim: self.dim,
            points,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, arm: usize) -> &[f64] {
        &self.points[arm]
    }
}

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
