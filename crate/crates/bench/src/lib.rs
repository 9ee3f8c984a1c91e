//! Fixtures shared by the benchmarks.

use abob_core::environments::{Environment, RewardKind, StationaryEnv};
use abob_core::{Abob, AnyPolicy, Label, Partition, Policy, PolicyKind, PolicyParams, RngStream};

pub const ARMS: usize = 256;
pub const HORIZON: u64 = 1_000_000;

pub fn environment(seed: u64) -> StationaryEnv {
    let root = RngStream::from_seed(seed);
    let mut rng = root.derive(Label::Named("means"));
    let means = (0..ARMS).map(|_| rng.uniform()).collect();
    StationaryEnv::new(means, RewardKind::Bernoulli, root.derive(Label::Env)).expect("valid means")
}

pub fn flat(kind: PolicyKind, seed: u64) -> AnyPolicy {
    let rng = RngStream::from_seed(seed).derive(Label::Child(0));
    AnyPolicy::new(kind, ARMS, HORIZON as f64, &PolicyParams::default(), rng).expect("valid policy")
}

/// Hierarchy over `p` contiguous, equal clusters.
pub fn hierarchy(kind: PolicyKind, p: usize, seed: u64) -> Abob {
    let size = ARMS / p;
    let clusters = (0..p)
        .map(|c| (c * size..(c + 1) * size).collect())
        .collect();
    let partition = Partition::new(clusters).expect("valid partition");
    Abob::new(
        partition,
        kind,
        kind,
        HORIZON,
        &PolicyParams::default(),
        &RngStream::from_seed(seed),
    )
    .expect("valid hierarchy")
}

pub fn flat_step<E: Environment>(policy: &mut AnyPolicy, env: &mut E) {
    env.advance().expect("advance");
    let arm = policy.select().expect("select");
    let r = env.pull(arm).expect("pull");
    policy.update(arm, r).expect("update");
}

pub fn hierarchy_step<E: Environment>(abob: &mut Abob, env: &mut E) {
    env.advance().expect("advance");
    abob.step(&*env).expect("step");
}
