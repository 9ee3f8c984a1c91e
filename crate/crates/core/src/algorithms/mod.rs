//! Flat bandit policies usable at either level of the hierarchy.

mod exp3;
mod tsallis;
mod ucb;

pub use exp3::{exp3_gamma, Exp3};
pub use tsallis::{solve_tsallis_normalization, TsallisInf, TsallisSolution};
pub use ucb::Ucb1;
