use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use porosim_cli::commands::{
    cmd_analyze, cmd_scale_report, cmd_simulate, cmd_sweep, error_line, exit_code, with_out_dir,
};
use porosim_cli::config::RunConfig;
use porosim_cli::validate::cmd_validate;

#[derive(Parser)]
#[command(
    name = "porosim",
    version,
    about = "Membrane dimple simulations and free boundary diagnostics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Config file; a bundled scenario name also works.
    #[arg(long)]
    config: Option<String>,
    /// Output directory, overriding `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the obstacle problem and write the trajectory.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Print the resolved config and exit.
        #[arg(long)]
        dry_run: bool,
    },
    /// Run the free boundary diagnostics on a trajectory CSV.
    Analyze {
        /// Trajectory written by `simulate`.
        trajectory: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Check the solver and diagnostics against the oracles.
    Validate {
        /// Only run checks whose name contains this.
        #[arg(long)]
        filter: Option<String>,
    },
    /// Force and energy magnitudes around the dimple top.
    ScaleReport {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        json: bool,
    },
    /// Refinement sweep, run concurrently (POROSIM_THREADS caps threads).
    Sweep {
        #[command(flatten)]
        common: Common,
    },
}

fn load(common: &Common) -> anyhow::Result<RunConfig> {
    let config = match &common.config {
        None => RunConfig::bundled("stationary-1d")?,
        Some(c) if !c.contains('/') && !c.contains('.') => RunConfig::bundled(c)?,
        Some(path) => RunConfig::load(std::path::Path::new(path))?,
    };
    Ok(with_out_dir(config, common.out.clone()))
}

fn run(cli: Cli, out: &mut dyn Write) -> anyhow::Result<i32> {
    match cli.command {
        Command::Simulate { common, dry_run } => cmd_simulate(&load(&common)?, dry_run, out),
        Command::Analyze { trajectory, common } => cmd_analyze(&trajectory, &load(&common)?, out),
        Command::Validate { filter } => cmd_validate(filter.as_deref(), out),
        Command::ScaleReport { common, json } => cmd_scale_report(&load(&common)?, json, out),
        Command::Sweep { common } => cmd_sweep(&load(&common)?, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let code = match run(cli, &mut out) {
        Ok(code) => code,
        Err(e) => {
            let _ = out.flush();
            eprintln!("{}", error_line(&e));
            exit_code(&e)
        }
    };
    ExitCode::from(code as u8)
}
