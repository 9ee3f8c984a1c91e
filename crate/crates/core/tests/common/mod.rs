#![allow(dead_code)]

use std::path::Path;

use abob_core::environments::{Environment, RewardKind, StationaryEnv};
use abob_core::runner::ExperimentConfig;
use abob_core::{
    Abob, AnyPolicy, ArmIndex, Label, Partition, Policy, PolicyKind, PolicyParams, RngStream,
};

pub fn bernoulli_env(k: usize, seed: u64) -> StationaryEnv {
    let root = RngStream::from_seed(seed);
    let mut means_rng = root.derive(Label::Named("means"));
    let means = (0..k).map(|_| means_rng.uniform()).collect();
    StationaryEnv::new(means, RewardKind::Bernoulli, root.derive(Label::Env)).unwrap()
}

pub fn flat_arms<E: Environment>(
    policy: &mut AnyPolicy,
    env: &mut E,
    horizon: u64,
) -> Vec<ArmIndex> {
    let mut arms = Vec::with_capacity(horizon as usize);
    for t in 0..horizon {
        if t > 0 {
            env.advance().unwrap();
        }
        let arm = policy.select().unwrap();
        let r = env.pull(arm).unwrap();
        policy.update(arm, r).unwrap();
        arms.push(arm);
    }
    arms
}

pub fn abob_arms<E: Environment>(abob: &mut Abob, env: &mut E, horizon: u64) -> Vec<ArmIndex> {
    let mut arms = Vec::with_capacity(horizon as usize);
    for t in 0..horizon {
        if t > 0 {
            env.advance().unwrap();
        }
        arms.push(abob.step(&*env).unwrap().arm);
    }
    arms
}

/// Compares ABoB at p = 1 with the flat child and at p = k with the flat
/// parent. Returns the first mismatch, if any.
pub fn degenerate_equivalence(
    parent: PolicyKind,
    child: PolicyKind,
    k: usize,
    horizon: u64,
    seed: u64,
) -> Result<(), String> {
    let params = PolicyParams::default();
    let rng = RngStream::from_seed(seed);
    let cases = [
        (
            Partition::single(k).unwrap(),
            child,
            Label::Child(0),
            "p = 1",
        ),
        (
            Partition::new((0..k).map(|a| vec![a]).collect()).unwrap(),
            parent,
            Label::Parent,
            "p = k",
        ),
    ];
    for (partition, flat_kind, label, name) in cases {
        let mut abob = Abob::new(partition, parent, child, horizon, &params, &rng).unwrap();
        let mut flat =
            AnyPolicy::new(flat_kind, k, horizon as f64, &params, rng.derive(label)).unwrap();
        let a = abob_arms(&mut abob, &mut bernoulli_env(k, seed), horizon);
        let b = flat_arms(&mut flat, &mut bernoulli_env(k, seed), horizon);
        if let Some(t) = (0..a.len()).find(|&t| a[t] != b[t]) {
            return Err(format!(
                "{name}: {parent}/{child} diverges at t = {t}: {} vs {}",
                a[t], b[t]
            ));
        }
    }
    Ok(())
}

/// Largest `|sum(p) - 1|` seen over `steps` fuzzed rounds of every policy
/// kind, with arm counts and Bernoulli means drawn from `seed`.
pub fn normalization_fuzz(steps: usize, seed: u64) -> f64 {
    let mut rng = RngStream::from_seed(seed).derive(Label::Named("fuzz"));
    let params = PolicyParams::default();
    let mut worst: f64 = 0.0;
    let per_kind = steps / PolicyKind::ALL.len();
    for (i, &kind) in PolicyKind::ALL.iter().enumerate() {
        let mut done = 0;
        let mut episode = 0;
        while done < per_kind {
            let k = 1 + (rng.uniform() * 64.0) as usize;
            let len = (500 + (rng.uniform() * 4500.0) as usize).min(per_kind - done);
            let stream = rng.derive(Label::Run(i * 1_000_000 + episode));
            let mut policy = AnyPolicy::new(kind, k, len as f64, &params, stream.clone()).unwrap();
            let mut env = bernoulli_env(k, seed.wrapping_add((i * 1_000_000 + episode) as u64));
            for t in 0..len {
                if t > 0 {
                    env.advance().unwrap();
                }
                let probs = policy.probabilities().unwrap();
                assert!(probs.iter().all(|p| p.is_finite() && *p >= 0.0));
                worst = worst.max((probs.iter().sum::<f64>() - 1.0).abs());
                let arm = policy.select().unwrap();
                policy.update(arm, env.pull(arm).unwrap()).unwrap();
            }
            done += len;
            episode += 1;
        }
    }
    worst
}

pub fn config(text: &str, out: &Path) -> ExperimentConfig {
    let mut c = ExperimentConfig::from_toml_str(text).unwrap();
    c.output.dir = out.to_path_buf();
    c
}
