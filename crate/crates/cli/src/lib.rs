//! Command line, file formats and figures for `hyperglue-core`.

pub mod commands;
pub mod config;
pub mod formats;
pub mod report_io;
pub mod svg;

use std::ffi::OsString;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::commands::{Failure, Outcome, RunContext};
use crate::config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "hyperglue", version, about = "Glued hyperconvex metric spaces: distances, checkers and figures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Master seed; required by randomized commands.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Output directory for reports, certificates and figures.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
    /// Overrides the trial count of the checker or sweep.
    #[arg(long, global = true, value_name = "N")]
    pub trials: Option<usize>,
    /// Overrides the feasibility tolerance.
    #[arg(long, global = true, value_name = "X")]
    pub eps: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Distance between two points of a glued space.
    #[command(name = "glue-dist")]
    GlueDist,
    /// Run one property checker on one set.
    Check,
    /// Two-half-plane counterexamples, phase sweep and figures.
    #[command(name = "repro-s5")]
    ReproS5,
    /// Phase sweep over the slopes only.
    Sweep,
    /// Figure of one two-half-plane configuration.
    Plot,
}

fn execute(cli: &Cli) -> Result<Outcome, Failure> {
    let cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None if matches!(cli.command, Command::GlueDist | Command::Check) => {
            return Err(Failure::Input(anyhow::anyhow!("this command needs --config PATH")));
        }
        None => RunConfig::empty(),
    };
    let ctx = RunContext::new(cfg, cli.seed, cli.out.clone(), cli.trials, cli.eps)?;
    match cli.command {
        Command::GlueDist => commands::cmd_glue_dist(&ctx),
        Command::Check => commands::cmd_check(&ctx),
        Command::ReproS5 => commands::cmd_repro_s5(&ctx),
        Command::Sweep => commands::cmd_sweep(&ctx),
        Command::Plot => commands::cmd_plot(&ctx),
    }
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code: 0 consistent, 1 falsified or mismatch, 2 input error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match catch_unwind(AssertUnwindSafe(|| execute(&cli))) {
        Ok(Ok(Outcome::Consistent)) => 0,
        Ok(Ok(Outcome::Mismatch)) => 1,
        Ok(Err(f)) => {
            eprintln!("hyperglue: {f}");
            f.exit_code()
        }
        Err(_) => {
            eprintln!("hyperglue: internal error while processing the input");
            2
        }
    }
}
