mod commands;
mod problem;
mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{CliError, Enclose1dArgs, Enclose2dArgs};

#[derive(Parser)]
#[command(name = "greenrep", version, about = "Verified pointwise enclosures for -Δu = f with zero Dirichlet data")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Enclose the solution on (0, 1) with certified sub- and super-solutions.
    Enclose1d {
        file: PathBuf,
        /// Mesh width 1/N (overrides the problem file).
        #[arg(long)]
        h: Option<f64>,
        /// Boundary shift (overrides the problem file and the default rule).
        #[arg(long)]
        c: Option<f64>,
        /// Run over the mesh widths in `oned.sweep` and report the gaps.
        #[arg(long)]
        sweep: bool,
        /// CSV output path (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the nodal bounds as JSON for plotting.
        #[arg(long)]
        emit_plot: Option<PathBuf>,
    },
    /// Enclose u at the evaluation points of a polygon problem.
    Enclose2d {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write per-point intervals and the domain as JSON for plotting.
        #[arg(long)]
        emit_plot: Option<PathBuf>,
    },
    /// Run fast consistency checks.
    Selftest {
        #[arg(long, hide = true)]
        inject_fault: Option<selftest::Fault>,
    },
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Input(format!("--threads: {e}")))?;
    }
    match cli.cmd {
        Cmd::Enclose1d { file, h, c, sweep, out, emit_plot } => {
            commands::enclose1d(&Enclose1dArgs { file, h, c, sweep, out, emit_plot })?
        }
        Cmd::Enclose2d { file, out, emit_plot } => commands::enclose2d(&Enclose2dArgs { file, out, emit_plot })?,
        Cmd::Selftest { inject_fault } => {
            if !selftest::run(inject_fault) {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("greenrep: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
