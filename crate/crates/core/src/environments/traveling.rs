use crate::environments::{arm_mean, ArmGrid, Environment, RewardKind};
use crate::error::{BanditError, Result};
use crate::rng::{Label, RngStream};
use crate::{ArmIndex, Reward};

/// `1 - ||a_star - position||`, which lies in `[0, 1]` because `Q` has unit
/// diameter.
pub fn traveling_mean(position: &[f64], a_star: &[f64]) -> Result<Reward> {
    let dim = position.len();
    if dim == 0 || a_star.len() != dim {
        return Err(BanditError::Domain(format!(
            "dimension mismatch ({} vs {})",
            position.len(),
            a_star.len()
        )));
    }
    let extent = 1.0 / (dim as f64).sqrt();
    for p in [position, a_star] {
        if p.iter().any(|&x| !(-1e-12..=extent + 1e-12).contains(&x)) {
            return Err(BanditError::Domain(format!(
                "{p:?} not in [0, {extent}]^{dim}"
            )));
        }
    }
    let dist = position
        .iter()
        .zip(a_star)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt();
    Reward::new((1.0 - dist).clamp(0.0, 1.0))
}

/// Location of the optimum and the per-axis step size of its random walk.
#[derive(Debug, Clone, PartialEq)]
pub struct TravelingState {
    pub a_star: Vec<f64>,
    pub sigma: f64,
}

impl TravelingState {
    /// Adds `noise` to the optimum and clips it back into `Q`.
    pub fn shift(&mut self, noise: &[f64]) {
        let extent = 1.0 / (self.a_star.len() as f64).sqrt();
        for (x, n) in self.a_star.iter_mut().zip(noise) {
            *x = (*x + n).clamp(0.0, extent);
        }
    }
}

/// One step of the clipped Gaussian random walk.
pub fn random_walk_advance(state: &mut TravelingState, rng: &mut RngStream) {
    let noise: Vec<f64> = (0..state.a_star.len())
        .map(|_| state.sigma * rng.standard_normal())
        .collect();
    state.shift(&noise);
}

/// Lattice arms whose means follow a moving optimum. With `sigma = 0` the
/// optimum never moves and the environment is stochastic.
#[derive(Debug, Clone)]
pub struct TravelingEnv {
    grid: ArmGrid,
    state: TravelingState,
    kind: RewardKind,
    walk: RngStream,
    noise: RngStream,
    means: Vec<f64>,
    u: f64,
    round: u64,
}

impl TravelingEnv {
    /// `rng` is split into independent walk and reward-noise streams.
    pub fn new(
        grid: ArmGrid,
        a_star: Vec<f64>,
        sigma: f64,
        kind: RewardKind,
        rng: &RngStream,
    ) -> Result<Self> {
        if !grid.contains(&a_star) {
            return Err(BanditError::Domain(format!(
                "initial optimum {a_star:?} outside Q"
            )));
        }
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(BanditError::InvalidArgument(format!(
                "random-walk sigma {sigma}"
            )));
        }
        kind.check_support(0.0, 1.0)?;
        let mut noise = rng.derive(Label::Named("reward"));
        let u = noise.uniform();
        let mut env = TravelingEnv {
            means: vec![0.0; grid.num_arms()],
            grid,
            state: TravelingState { a_star, sigma },
            kind,
            walk: rng.derive(Label::Named("walk")),
            noise,
            u,
            round: 0,
        };
        env.refresh_means()?;
        Ok(env)
    }

    /// Default step size: one hundredth of the lattice spacing.
    pub fn default_sigma(grid: &ArmGrid) -> f64 {
        grid.spacing() / 100.0
    }

    fn refresh_means(&mut self) -> Result<()> {
        for (m, x) in self.means.iter_mut().zip(self.grid.positions()) {
            *m = traveling_mean(x, &self.state.a_star)?.get();
        }
        Ok(())
    }

    pub fn grid(&self) -> &ArmGrid {
        &self.grid
    }

    pub fn state(&self) -> &TravelingState {
        &self.state
    }
}

impl Environment for TravelingEnv {
    fn num_arms(&self) -> usize {
        self.grid.num_arms()
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
        if self.state.sigma > 0.0 {
            random_walk_advance(&mut self.state, &mut self.walk);
            self.refresh_means()?;
        }
        self.u = self.noise.uniform();
        Ok(())
    }
}
