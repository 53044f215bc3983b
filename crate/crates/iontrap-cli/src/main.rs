//! Command-line front end: scenario configuration, seeded experiment
//! execution, and bit-stable result emission for external plotting.

mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use config::{load_scenario, Scenario, ScenarioKind};

#[derive(Debug, Parser)]
#[command(
    name = "iontrap",
    version,
    about = "Trapped-ion qubit and motional-state simulator",
    after_help = "Each run writes its artifacts, the fully resolved \
configuration, and a manifest (version, seed, config hash, wall time) into \
the output directory. Identical scenario and seed yield byte-identical data \
artifacts."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Scenario file (TOML; .json also accepted).
    #[arg(long)]
    config: PathBuf,
    /// Override the seed recorded in the scenario file.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for artifacts.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Cap the worker-thread count for parallel maps.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate the classical trap motion and check the secular model.
    Trap(RunArgs),
    /// Sideband-cool a thermal state and record the populations per cycle.
    Cool(RunArgs),
    /// Synthesize, sample, and invert a blue-sideband flopping signal.
    Flop(RunArgs),
    /// Prepare a two-branch cat state and sweep the closing interferometer.
    Cat(RunArgs),
    /// Sample the Wigner function of a motional state on a phase-space grid.
    Wigner(RunArgs),
    /// Reconstruct a motional density matrix from displaced populations.
    Densmat(RunArgs),
    /// Run the single-ion CN gate truth table.
    Cngate(RunArgs),
    /// Run the two-ion register gate or GHZ preparation.
    Register(RunArgs),
    /// Monte Carlo Ramsey clock comparison against the projection-noise bound.
    Ramsey(RunArgs),
    /// Validate a scenario file and echo the fully resolved configuration.
    Validate {
        /// Scenario file to check.
        #[arg(long)]
        config: PathBuf,
    },
}

fn expect_kind(scenario: &Scenario, expected: ScenarioKind) -> Result<()> {
    if scenario.kind() != expected {
        anyhow::bail!(
            "scenario kind `{}` does not match the `{}` subcommand",
            scenario.kind().as_str(),
            expected.as_str()
        );
    }
    Ok(())
}

fn execute(args: &RunArgs, expected: ScenarioKind) -> Result<()> {
    if let Some(threads) = args.threads {
        if threads == 0 {
            anyhow::bail!("--threads must be >= 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("initializing worker pool")?;
    }
    let mut scenario = load_scenario(&args.config)?;
    expect_kind(&scenario, expected)?;
    if let Some(seed) = args.seed {
        scenario.set_seed(seed);
    }
    let artifacts = run::run_scenario(&scenario, &args.out)?;
    for name in &artifacts {
        println!("{}", args.out.join(name).display());
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Trap(a) => execute(a, ScenarioKind::Trap),
        Command::Cool(a) => execute(a, ScenarioKind::Cool),
        Command::Flop(a) => execute(a, ScenarioKind::Flop),
        Command::Cat(a) => execute(a, ScenarioKind::Cat),
        Command::Wigner(a) => execute(a, ScenarioKind::Wigner),
        Command::Densmat(a) => execute(a, ScenarioKind::Densmat),
        Command::Cngate(a) => execute(a, ScenarioKind::Cngate),
        Command::Register(a) => execute(a, ScenarioKind::Register),
        Command::Ramsey(a) => execute(a, ScenarioKind::Ramsey),
        Command::Validate { config } => {
            let scenario = load_scenario(config)?;
            serde_json::to_writer_pretty(std::io::stdout().lock(), &scenario)?;
            println!();
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let record = serde_json::json!({
                "error": {
                    "message": err.to_string(),
                    "chain": err.chain().skip(1).map(|c| c.to_string()).collect::<Vec<_>>(),
                }
            });
            eprintln!("{record}");
            ExitCode::FAILURE
        }
    }
}
