//! Deterministic, splittable random streams.
//!
//! Every stream is a ChaCha12 generator keyed by 256 bits of seed material.
//! Child streams are keyed by mixing the parent's seed material with a
//! [`Label`], so `derive` depends only on `(seed, label)` and never on how far
//! the parent stream has advanced.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::error::{BanditError, Result};
use crate::ArmIndex;

/// Names a child stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label<'a> {
    Parent,
    Child(usize),
    Env,
    Run(usize),
    Named(&'a str),
}

impl Label<'_> {
    fn words(&self) -> Vec<u64> {
        match *self {
            Label::Parent => vec![1],
            Label::Child(i) => vec![2, i as u64],
            Label::Env => vec![3],
            Label::Run(i) => vec![4, i as u64],
            Label::Named(s) => {
                let mut w = vec![5, s.len() as u64];
                w.extend(s.bytes().map(u64::from));
                w
            }
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A reproducible random stream.
#[derive(Clone)]
pub struct RngStream {
    key: [u64; 4],
    rng: ChaCha12Rng,
}

impl std::fmt::Debug for RngStream {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RngStream")
            .field("key", &self.key)
            .field("word_pos", &self.rng.get_word_pos())
            .finish()
    }
}

impl PartialEq for RngStream {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key && self.rng.get_word_pos() == other.rng.get_word_pos()
    }
}

impl RngStream {
    /// Root stream for a master seed.
    pub fn from_seed(seed: u64) -> Self {
        let mut key = [0u64; 4];
        let mut s = seed;
        for lane in key.iter_mut() {
            s = splitmix64(s);
            *lane = s;
        }
        Self::from_key(key)
    }

    fn from_key(key: [u64; 4]) -> Self {
        let mut bytes = [0u8; 32];
        for (chunk, lane) in bytes.chunks_exact_mut(8).zip(key.iter()) {
            chunk.copy_from_slice(&lane.to_le_bytes());
        }
        RngStream {
            key,
            rng: ChaCha12Rng::from_seed(bytes),
        }
    }

    /// Independent child stream keyed by `(self.seed, label)`.
    pub fn derive(&self, label: Label<'_>) -> Self {
        let words = label.words();
        let mut key = [0u64; 4];
        for (lane, out) in key.iter_mut().enumerate() {
            let mut h =
                splitmix64(self.key[lane] ^ (lane as u64).wrapping_mul(0xA24B_AED4_963E_E407));
            for &w in &words {
                h = splitmix64(h ^ w);
            }
            // cross-lane diffusion so equal lanes never collapse
            *out = splitmix64(h ^ self.key[(lane + 1) % 4].rotate_left(17));
        }
        Self::from_key(key)
    }

    /// Uniform draw in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    /// Standard normal draw.
    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.rng.try_fill_bytes(dest)
    }
}

/// Draws an arm from `probs` using exactly one uniform draw.
pub fn sample_categorical(probs: &[f64], rng: &mut RngStream) -> Result<ArmIndex> {
    if probs.is_empty() {
        return Err(BanditError::InvalidDistribution(
            "empty probability vector".into(),
        ));
    }
    let mut sum = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        if !(p >= 0.0) || !p.is_finite() {
            return Err(BanditError::InvalidDistribution(format!(
                "entry {i} is {p}"
            )));
        }
        sum += p;
    }
    if (sum - 1.0).abs() > 1e-6 {
        return Err(BanditError::InvalidDistribution(format!(
            "probabilities sum to {sum}"
        )));
    }
    let u = rng.uniform() * sum;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            last_positive = i;
            acc += p;
            if u < acc {
                return Ok(i);
            }
        }
    }
    Ok(last_positive)
}
