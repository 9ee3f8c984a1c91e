use crate::error::{BanditError, Result};
use crate::ArmIndex;

/// Arms on an axis-aligned lattice in `Q = [0, 1/sqrt(d)]^d`.
///
/// The lattice includes the faces of `Q`, so opposite corners are at
/// distance 1. Arm `i` has lattice coordinates given by the base-`side`
/// digits of `i`, most significant first.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmGrid {
    dim: usize,
    side: usize,
    positions: Vec<Vec<f64>>,
}

/// Integer `d`-th root of `n`, if it exists.
pub fn grid_root(n: usize, d: usize) -> Option<usize> {
    if d == 0 {
        return None;
    }
    let guess = (n as f64).powf(1.0 / d as f64).round() as usize;
    (guess.saturating_sub(1)..=guess + 1).find(|&r| r.checked_pow(d as u32) == Some(n))
}

impl ArmGrid {
    pub fn new(k: usize, dim: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(BanditError::InvalidArgument(format!(
                "grid dimension must be 1, 2 or 3, got {dim}"
            )));
        }
        let side = grid_root(k, dim).filter(|&s| s >= 1).ok_or_else(|| {
            BanditError::InvalidArgument(format!(
                "{k} arms do not form a {dim}-dimensional lattice"
            ))
        })?;
        let spacing = if side > 1 {
            Self::extent_for(dim) / (side - 1) as f64
        } else {
            0.0
        };
        let positions = (0..k)
            .map(|i| {
                Self::digits(i, side, dim)
                    .into_iter()
                    .map(|c| c as f64 * spacing)
                    .collect()
            })
            .collect();
        Ok(ArmGrid {
            dim,
            side,
            positions,
        })
    }

    fn extent_for(dim: usize) -> f64 {
        1.0 / (dim as f64).sqrt()
    }

    fn digits(mut i: usize, side: usize, dim: usize) -> Vec<usize> {
        let mut out = vec![0; dim];
        for slot in out.iter_mut().rev() {
            *slot = i % side;
            i /= side;
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_arms(&self) -> usize {
        self.positions.len()
    }

    /// Arms per axis.
    pub fn side(&self) -> usize {
        self.side
    }

    /// Edge length of `Q`.
    pub fn extent(&self) -> f64 {
        Self::extent_for(self.dim)
    }

    /// Distance between neighbouring arms along an axis.
    pub fn spacing(&self) -> f64 {
        if self.side > 1 {
            self.extent() / (self.side - 1) as f64
        } else {
            0.0
        }
    }

    pub fn positions(&self) -> &[Vec<f64>] {
        &self.positions
    }

    pub fn position(&self, arm: ArmIndex) -> &[f64] {
        &self.positions[arm]
    }

    /// Lattice coordinates of an arm.
    pub fn coordinates(&self, arm: ArmIndex) -> Vec<usize> {
        Self::digits(arm, self.side, self.dim)
    }

    /// Centre of `Q`.
    pub fn center(&self) -> Vec<f64> {
        vec![0.5 * self.extent(); self.dim]
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        let hi = self.extent() + 1e-12;
        point.len() == self.dim && point.iter().all(|&x| (-1e-12..=hi).contains(&x))
    }
}
