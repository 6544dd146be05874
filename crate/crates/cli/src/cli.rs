//! Argument parsing and the exit-code contract: 0 success or PASS, 1 FAIL,
//! 2 configuration, numerical or I/O error.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{parse_config, CommandKind, Overrides, Target};
use crate::error::Result;

#[derive(Debug, Parser)]
#[command(name = "fraclab", version, about = "Numerical laboratory for the fractional p-Laplacian")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Also write SVG plots where available.
    #[arg(long, global = true)]
    pub svg: bool,
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    /// Nodes per axis.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub s: Option<f64>,
    #[arg(long, global = true)]
    pub p: Option<f64>,
    #[arg(long, global = true)]
    pub t: Option<f64>,
    #[arg(long, global = true)]
    pub lambda: Option<f64>,
    #[arg(long, global = true)]
    pub max_iterations: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimize the Dirichlet energy.
    Solve,
    /// Evaluate a seminorm of a closed-form function.
    Seminorm,
    /// Exponent bookkeeping and measured order of a solution.
    Estimate,
    /// Run one verification target.
    Verify { target: Target },
    /// Let s approach one on a closed-form family.
    Sweep,
    /// Time the dense workloads.
    Bench,
}

impl Cli {
    pub fn overrides(&self) -> Overrides {
        let g = &self.global;
        let (command, target) = match self.command {
            Command::Solve => (CommandKind::Solve, None),
            Command::Seminorm => (CommandKind::Seminorm, None),
            Command::Estimate => (CommandKind::Estimate, None),
            Command::Verify { target } => (CommandKind::Verify, Some(target)),
            Command::Sweep => (CommandKind::Sweep, None),
            Command::Bench => (CommandKind::Bench, None),
        };
        Overrides {
            command: Some(command),
            target,
            out: g.out.clone(),
            seed: g.seed,
            workers: g.workers,
            svg: g.svg,
            dim: g.dim,
            n: g.n,
            s: g.s,
            p: g.p,
            t: g.t,
            lambda: g.lambda,
            max_iterations: g.max_iterations,
        }
    }
}

fn execute(cli: &Cli) -> Result<i32> {
    let cfg = parse_config(cli.global.config.as_deref(), &cli.overrides())?;
    Ok(crate::run(&cfg)?.exit_code())
}

/// Parses `args` and runs; returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
