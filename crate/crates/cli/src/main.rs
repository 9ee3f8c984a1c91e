//! `abob`: run bandit experiments from a TOML config.

use std::path::PathBuf;
use std::process::ExitCode;

use abob_core::runner::{execute, Command, ExperimentConfig, Summary};
use abob_core::BanditError;
use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "abob", version, about = "Hierarchical bandit experiments")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Run the configured algorithm for every repeat.
    Run(CommonArgs),
    /// Sweep the number of clusters.
    Sweep(CommonArgs),
    /// Replay a recorded reward trace.
    Replay(CommonArgs),
    /// Estimate per-arm Lipschitz constants and write lipschitz.csv.
    Lipschitz(CommonArgs),
    /// Check a config without running anything.
    Validate(CommonArgs),
}

#[derive(Args, Debug)]
struct CommonArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    repeats: Option<usize>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

fn load(args: &CommonArgs) -> Result<ExperimentConfig, BanditError> {
    let mut config = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        config.experiment.seed = seed;
    }
    if let Some(repeats) = args.repeats {
        config.experiment.repeats = repeats;
    }
    if let Some(workers) = args.workers {
        config.experiment.workers = workers;
    }
    if let Some(out) = &args.out {
        config.output.dir = out.clone();
    }
    config.validate()?;
    Ok(config)
}

fn report(summary: &Summary) {
    for run in &summary.runs {
        println!(
            "{}: regret {:.1} ± {:.1} over {} repeats",
            run.label,
            run.mean_regret,
            run.std_regret,
            run.final_regrets.len()
        );
    }
    for row in &summary.sweep {
        println!(
            "p = {:>4}: regret {:.1} ± {:.1}",
            row.p, row.mean_regret, row.std_regret
        );
    }
    for s in &summary.skipped {
        println!("p = {:>4}: skipped ({})", s.p, s.reason);
    }
    for c in &summary.comparisons {
        match &c.test {
            Some(t) => println!("{} vs {}: t = {:.3}, p = {:.3e}", c.a, c.b, t.t, t.p_value),
            None => println!(
                "{} vs {}: {}",
                c.a,
                c.b,
                c.error.as_deref().unwrap_or("no test")
            ),
        }
    }
    if let Some(l) = &summary.lipschitz {
        println!("median ell = {:.4} (n = {})", l.median, l.neighbors);
        for (i, m) in l.shuffled_medians.iter().enumerate() {
            println!("  shuffle {i}: median ell = {m:.4}");
        }
    }
    println!("wall clock: {:.2}s", summary.wall_clock_seconds);
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (command, args) = match &cli.command {
        Cmd::Run(a) => (Command::Run, a),
        Cmd::Sweep(a) => (Command::Sweep, a),
        Cmd::Replay(a) => (Command::Replay, a),
        Cmd::Lipschitz(a) => (Command::Lipschitz, a),
        Cmd::Validate(a) => (Command::Validate, a),
    };

    let config = match load(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };

    match execute(command, &config) {
        Ok(summary) => {
            if command == Command::Validate {
                println!("{}: ok", args.config.display());
            } else {
                report(&summary);
                println!("wrote results to {}", config.output.dir.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) if e.is_config_error() || command == Command::Validate => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}
