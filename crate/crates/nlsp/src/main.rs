//! Thin CLI over the scenario runner.
//!
//! Exit codes: 0 success (blow-up is a result, not a failure), 2 config
//! error, 3 numerical failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nlsp::runner::{self, Scenario};
use nlsp::Error;

#[derive(Parser)]
#[command(name = "nlsp", version, about = "Nonlocal semilinear parabolic equation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Run configuration (TOML)
    #[arg(long)]
    config: PathBuf,
    /// Output directory override
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed override
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a single trajectory (scenarios simulate / shear-suppression)
    Simulate(CommonArgs),
    /// Compute the dissipation time of the configured flow
    DissipationTime(CommonArgs),
    /// Integrate a ladder of initial amplitudes and classify the outcomes
    BlowupScan(CommonArgs),
    /// Run many configs concurrently and aggregate one row per config
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Additional config files (one sweep row each, after the first)
        #[arg(long = "row", num_args = 0..)]
        rows: Vec<PathBuf>,
        /// Worker threads
        #[arg(long, default_value_t = 2)]
        threads: usize,
    },
    /// Continue a simulate run from a checkpoint
    Resume {
        #[command(flatten)]
        common: CommonArgs,
        /// Checkpoint file to resume from
        #[arg(long)]
        checkpoint: PathBuf,
    },
}

fn expect_scenario(cfg: &runner::RunConfig, allowed: &[Scenario]) -> Result<(), Error> {
    if allowed.contains(&cfg.scenario) {
        Ok(())
    } else {
        Err(Error::Config(vec![format!(
            "this subcommand runs scenarios {:?}, but the config says `{}`",
            allowed.iter().map(|s| s.as_str()).collect::<Vec<_>>(),
            cfg.scenario.as_str()
        )]))
    }
}

fn dispatch(cli: Cli) -> Result<bool, Error> {
    match cli.command {
        Command::Simulate(a) => {
            let cfg = runner::load_config_file(&a.config, a.out, a.seed)?;
            expect_scenario(&cfg, &[Scenario::Simulate, Scenario::ShearSuppression])?;
            Ok(runner::run(&cfg)?.numerical_failure)
        }
        Command::DissipationTime(a) => {
            let cfg = runner::load_config_file(&a.config, a.out, a.seed)?;
            expect_scenario(&cfg, &[Scenario::DissipationTime])?;
            Ok(runner::run(&cfg)?.numerical_failure)
        }
        Command::BlowupScan(a) => {
            let cfg = runner::load_config_file(&a.config, a.out, a.seed)?;
            expect_scenario(&cfg, &[Scenario::BlowupScan])?;
            Ok(runner::run(&cfg)?.numerical_failure)
        }
        Command::Sweep {
            common,
            rows,
            threads,
        } => {
            let first = runner::load_config_file(&common.config, None, common.seed)?;
            let mut configs = vec![first.clone()];
            for row in rows {
                configs.push(runner::load_config_file(&row, None, common.seed)?);
            }
            let out = common
                .out
                .unwrap_or_else(|| first.output_dir.clone());
            let table = runner::sweep(&configs, threads, &out)?;
            Ok(table.iter().any(|r| r.status == "step-collapse"))
        }
        Command::Resume {
            common,
            checkpoint,
        } => {
            let cfg = runner::load_config_file(&common.config, common.out, common.seed)?;
            expect_scenario(&cfg, &[Scenario::Simulate, Scenario::ShearSuppression])?;
            Ok(runner::resume(&cfg, &checkpoint)?.numerical_failure)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => {
            eprintln!("numerical failure (step collapse); artifacts were written");
            ExitCode::from(3)
        }
        Err(Error::Config(violations)) => {
            eprintln!("configuration invalid:");
            for v in &violations {
                eprintln!("  - {v}");
            }
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
