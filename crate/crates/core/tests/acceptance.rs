//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::fs;
use std::time::Instant;

use abob_core::algorithms::solve_tsallis_normalization;
use abob_core::environments::{traveling_mean, ArmGrid};
use abob_core::partition::{
    kmeans_partition, round_robin_partition, shuffled_partition, ArmFeatures, KMeansOptions,
};
use abob_core::runner::{
    execute, lipschitz_analysis, mean, run_repeats, sweep_clusters, welch_t_test, AlgorithmSpec,
    Command, ExperimentConfig,
};
use abob_core::{Label, Partition, PolicyKind, RngStream};
use common::{config, degenerate_equivalence, normalization_fuzz};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn experiment(text: &str) -> ExperimentConfig {
    let mut c = ExperimentConfig::from_toml_str(text).unwrap();
    c.output.max_trajectory_rows = 1;
    c
}

const TSALLIS_1D: &str = r#"
[experiment]
arms = 256
dim = 1
horizon = 100000
repeats = 10
seed = 2024

[environment]
kind = "traveling"
sigma = 0.0

[algorithm]
kind = "abob"
parent = "tsallis"
child = "tsallis"
"#;

fn c1_equivalence() -> Outcome {
    let mut pairs = 0;
    for parent in PolicyKind::ALL {
        for child in PolicyKind::ALL {
            degenerate_equivalence(parent, child, 16, 10_000, 1)?;
            pairs += 1;
        }
    }
    Ok(format!(
        "{pairs} parent/child pairs identical at p = 1 and p = k over T = 10^4"
    ))
}

fn c2_c3_stochastic_1d() -> (Outcome, Outcome) {
    let cfg = experiment(TSALLIS_1D);
    let ps: Vec<usize> = (0..=8).map(|e| 1 << e).collect();
    let sweep = match sweep_clusters(&cfg, &ps) {
        Ok(s) => s,
        Err(e) => return (Err(e.to_string()), Err(e.to_string())),
    };
    let flat = match run_repeats(&cfg, AlgorithmSpec::Flat(PolicyKind::TsallisInf), 1, "flat") {
        Ok(f) => f,
        Err(e) => return (Err(e.to_string()), Err(e.to_string())),
    };
    let flat_mean = mean(&flat.final_regrets);
    let p16 = sweep.rows.iter().find(|r| r.p == 16).unwrap();

    let c2 = match welch_t_test(&p16.final_regrets, &flat.final_regrets) {
        Ok(w) => {
            let ratio = p16.mean_regret / flat_mean;
            check(
                ratio <= 0.6 && w.p_value < 0.01,
                format!(
                    "p = 16 regret {:.0} vs flat {:.0} (ratio {ratio:.3}, need <= 0.6), Welch p = {:.2e} (need < 0.01)",
                    p16.mean_regret, flat_mean, w.p_value
                ),
            )
        }
        Err(e) => Err(e.to_string()),
    };

    let curve: Vec<String> = sweep
        .rows
        .iter()
        .map(|r| format!("{}:{:.0}", r.p, r.mean_regret))
        .collect();
    let interior = &sweep.rows[1..sweep.rows.len() - 1];
    let best = interior
        .iter()
        .min_by(|a, b| a.mean_regret.total_cmp(&b.mean_regret))
        .unwrap();
    let overall_min = sweep
        .rows
        .iter()
        .map(|r| r.mean_regret)
        .fold(f64::INFINITY, f64::min);
    let first = sweep.rows.first().unwrap().mean_regret;
    let last = sweep.rows.last().unwrap().mean_regret;
    let c3 = check(
        best.mean_regret == overall_min
            && first >= 1.25 * best.mean_regret
            && last >= 1.25 * best.mean_regret,
        format!(
            "minimum at p = {} ({:.0}); endpoints {:.2}x and {:.2}x of it (need >= 1.25) [{}]",
            best.p,
            best.mean_regret,
            first / best.mean_regret,
            last / best.mean_regret,
            curve.join(" ")
        ),
    );
    (c2, c3)
}

fn c4_traveling_2d() -> Outcome {
    let cfg = experiment(
        &TSALLIS_1D
            .replace("dim = 1", "dim = 2")
            .replace("sigma = 0.0\n", ""),
    );
    let abob = run_repeats(
        &cfg,
        AlgorithmSpec::Abob {
            parent: PolicyKind::TsallisInf,
            child: PolicyKind::TsallisInf,
        },
        16,
        "abob",
    )
    .map_err(|e| e.to_string())?;
    let flat = run_repeats(&cfg, AlgorithmSpec::Flat(PolicyKind::TsallisInf), 1, "flat")
        .map_err(|e| e.to_string())?;
    let (a, f) = (mean(&abob.final_regrets), mean(&flat.final_regrets));
    check(
        a <= 0.5 * f,
        format!(
            "p = 16 regret {a:.0} vs flat {f:.0} (ratio {:.3}, need <= 0.5)",
            a / f
        ),
    )
}

fn c5_exp3_bound() -> Outcome {
    let cfg = experiment(
        r#"
[experiment]
arms = 16
horizon = 100000
repeats = 10
seed = 2024

[environment]
kind = "stochastic_gap"
delta = 0.1

[algorithm]
kind = "flat"
flat = "exp3"
"#,
    );
    let out = run_repeats(&cfg, AlgorithmSpec::Flat(PolicyKind::Exp3), 1, "exp3")
        .map_err(|e| e.to_string())?;
    let m = mean(&out.final_regrets);
    let (t, k) = (1e5_f64, 16_f64);
    let bound = 2.63 * (t * k * k.ln()).sqrt();
    let cap = t * 0.1 / 2.0;
    check(
        m < bound && m < cap,
        format!("mean pseudo-regret {m:.0} (need < {bound:.0} and < {cap:.0})"),
    )
}

fn c6_lipschitz() -> Outcome {
    let cfg = experiment(
        &TSALLIS_1D
            .replace("dim = 1", "dim = 2")
            .replace("sigma = 0.0\n", ""),
    );
    let (_, summary) = lipschitz_analysis(&cfg).map_err(|e| e.to_string())?;
    let lowest = summary
        .shuffled_medians
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    check(
        summary.median <= 1.05 && summary.shuffled_medians.len() == 10 && lowest >= 2.0 * summary.median,
        format!(
            "median ell {:.3} (need <= 1.05); smallest of {} shuffled medians {:.3} = {:.2}x (need >= 2)",
            summary.median,
            summary.shuffled_medians.len(),
            lowest,
            lowest / summary.median
        ),
    )
}

fn c7_clustered_ucb() -> Outcome {
    let cfg = experiment(
        r#"
[experiment]
arms = 256
horizon = 100000
repeats = 10
seed = 2024

[environment]
kind = "clustered_gap"
clusters = 16
between = 0.2
within = 0.05

[algorithm]
kind = "abob"
parent = "ucb1"
child = "ucb1"
"#,
    );
    let h = run_repeats(
        &cfg,
        AlgorithmSpec::Abob {
            parent: PolicyKind::Ucb1,
            child: PolicyKind::Ucb1,
        },
        16,
        "h",
    )
    .map_err(|e| e.to_string())?;
    let f = run_repeats(&cfg, AlgorithmSpec::Flat(PolicyKind::Ucb1), 1, "f")
        .map_err(|e| e.to_string())?;
    let w = welch_t_test(&h.final_regrets, &f.final_regrets).map_err(|e| e.to_string())?;
    let (a, b) = (mean(&h.final_regrets), mean(&f.final_regrets));
    check(
        a < b && w.p_value < 0.05,
        format!(
            "hierarchical UCB {a:.0} vs flat UCB {b:.0}, Welch p = {:.2e} (need < 0.05)",
            w.p_value
        ),
    )
}

fn tsallis_residual() -> f64 {
    let mut rng = RngStream::from_seed(8).derive(Label::Named("tsallis"));
    let mut worst: f64 = 0.0;
    for _ in 0..20_000 {
        let k = 2 + (rng.uniform() * 300.0) as usize;
        let scale = 10f64.powf(rng.uniform() * 6.0 - 1.0);
        let losses: Vec<f64> = (0..k).map(|_| rng.uniform() * scale).collect();
        let eta = 1.0 / (1.0 + rng.uniform() * 1e6).sqrt();
        let sol = solve_tsallis_normalization(&losses, eta).unwrap();
        let total: f64 = losses
            .iter()
            .map(|l| 4.0 / (eta * (l - sol.x)).powi(2))
            .sum();
        worst = worst.max((total - 1.0).abs());
    }
    worst
}

fn partition_is_valid(p: &Partition, k: usize, clusters: usize) -> bool {
    let mut seen = vec![0u32; k];
    for c in p.clusters() {
        if c.is_empty() {
            return false;
        }
        for &a in c {
            if a >= k {
                return false;
            }
            seen[a] += 1;
        }
    }
    p.num_clusters() == clusters && seen.iter().all(|&n| n == 1)
}

fn randomized_partitions() -> Result<usize, String> {
    let mut rng = RngStream::from_seed(13).derive(Label::Named("partitions"));
    let mut checked = 0;
    for _ in 0..300 {
        let k = 1 + (rng.uniform() * 200.0) as usize;
        let divisors: Vec<usize> = (1..=k).filter(|d| k.is_multiple_of(*d)).collect();
        let p = divisors[(rng.uniform() * divisors.len() as f64) as usize];
        let q = 1 + (rng.uniform() * k as f64) as usize;
        let features =
            ArmFeatures::new((0..k).map(|_| vec![rng.uniform(), rng.uniform()]).collect())
                .map_err(|e| e.to_string())?;
        let candidates = [
            ("round robin", p, round_robin_partition(k, p)),
            ("shuffled", p, shuffled_partition(k, p, &mut rng)),
            (
                "k-means",
                q,
                kmeans_partition(&features, q, &mut rng, KMeansOptions::default()),
            ),
        ];
        for (name, p, part) in candidates {
            let part = part.map_err(|e| format!("{name} k = {k} p = {p}: {e}"))?;
            if !partition_is_valid(&part, k, p) {
                return Err(format!("{name} k = {k} p = {p} is not a partition"));
            }
            checked += 1;
        }
    }
    Ok(checked)
}

fn traveling_is_lipschitz() -> Result<usize, String> {
    let mut rng = RngStream::from_seed(17).derive(Label::Named("lipschitz"));
    let mut pairs = 0;
    for dim in [1, 2] {
        let grid = ArmGrid::new(256, dim).unwrap();
        for _ in 0..5 {
            let a_star: Vec<f64> = (0..dim).map(|_| rng.uniform() * grid.extent()).collect();
            let means: Vec<f64> = (0..256)
                .map(|a| traveling_mean(grid.position(a), &a_star).unwrap().get())
                .collect();
            for a in 0..256 {
                for b in 0..256 {
                    let d = grid
                        .position(a)
                        .iter()
                        .zip(grid.position(b))
                        .map(|(x, y)| (x - y).powi(2))
                        .sum::<f64>()
                        .sqrt();
                    if (means[a] - means[b]).abs() > d + 1e-12 {
                        return Err(format!(
                            "d = {dim}: arms {a}, {b} violate the Lipschitz condition"
                        ));
                    }
                    pairs += 1;
                }
            }
        }
    }
    Ok(pairs)
}

fn pipeline_is_deterministic() -> Result<(), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let text = TSALLIS_1D
        .replace("horizon = 100000", "horizon = 2000")
        .replace("repeats = 10", "repeats = 3")
        + "\n[sweep]\nclusters = [1, 4, 16, 64]\n";
    let cfg = config(&text, dir.path());
    let snapshot = || -> Result<Vec<String>, String> {
        execute(Command::Sweep, &cfg).map_err(|e| e.to_string())?;
        ["trajectory.csv", "sweep.csv", "summary.json"]
            .iter()
            .map(|f| fs::read_to_string(dir.path().join(f)).map_err(|e| e.to_string()))
            .collect()
    };
    let strip = |s: &str| -> String {
        s.lines()
            .filter(|l| !l.contains("\"wall_clock_seconds\""))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let a = snapshot()?;
    let b = snapshot()?;
    if a[0] != b[0] || a[1] != b[1] {
        return Err("CSV outputs differ between runs".into());
    }
    if strip(&a[2]) != strip(&b[2]) {
        return Err("summary.json differs beyond wall-clock time".into());
    }
    Ok(())
}

fn c8_properties() -> Outcome {
    let mut failures = Vec::new();
    let mut notes = Vec::new();

    let worst = normalization_fuzz(1_000_000, 99);
    notes.push(format!("normalization {worst:.1e}"));
    if worst > 1e-9 {
        failures.push(format!("probabilities off by {worst:e}"));
    }
    let residual = tsallis_residual();
    notes.push(format!("Tsallis residual {residual:.1e}"));
    if residual > 1e-9 {
        failures.push(format!("Tsallis residual {residual:e}"));
    }
    match randomized_partitions() {
        Ok(n) => notes.push(format!("{n} partitions valid")),
        Err(e) => failures.push(e),
    }
    match traveling_is_lipschitz() {
        Ok(n) => notes.push(format!("{n} Lipschitz pairs")),
        Err(e) => failures.push(e),
    }
    match pipeline_is_deterministic() {
        Ok(()) => notes.push("pipeline byte-identical".into()),
        Err(e) => failures.push(e),
    }
    if failures.is_empty() {
        Ok(notes.join(", "))
    } else {
        Err(failures.join("; "))
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let r = f();
    (r, start.elapsed().as_secs_f64())
}

fn main() {
    let mut results: Vec<(&str, Outcome, f64)> = Vec::new();

    let (r, secs) = timed(c1_equivalence);
    results.push(("C1 degenerate-partition equivalence", r, secs));
    let ((c2, c3), secs) = timed(c2_c3_stochastic_1d);
    results.push(("C2 1D stochastic, ABoB p=16 vs flat", c2, secs));
    results.push(("C3 U-shape over p = 2^0..2^8", c3, secs));
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 5] = [
        ("C4 traveling arm 2D, ABoB p=16 vs flat", c4_traveling_2d),
        ("C5 EXP3 regret bound", c5_exp3_bound),
        ("C6 Lipschitz estimator separation", c6_lipschitz),
        ("C7 hierarchical vs flat UCB", c7_clustered_ucb),
        ("C8 property suites", c8_properties),
    ];
    for (name, f) in criteria {
        let (r, secs) = timed(f);
        results.push((name, r, secs));
    }

    for (name, r, secs) in &results {
        match r {
            Ok(d) => println!("PASS {name}: {d} [{secs:.1}s]"),
            Err(d) => println!("FAIL {name}: {d} [{secs:.1}s]"),
        }
    }
    let failed = results.iter().filter(|(_, r, _)| r.is_err()).count();
    println!(
        "acceptance: {} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
