//! `fembench` command-line runner.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::JobConfig;
use crate::error::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "fembench", version, about = "Run finite-element benchmark jobs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutputOverrides {
    /// Write the result JSON here.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write CSV rows here.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write a VTK field dump here (run only).
    #[arg(long)]
    vtk: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one job and print its run record.
    Run {
        config: PathBuf,
        #[command(flatten)]
        output: OutputOverrides,
    },
    /// Solve on successively refined meshes and fit convergence rates.
    Converge {
        config: PathBuf,
        #[arg(long, default_value_t = 3)]
        levels: usize,
        #[command(flatten)]
        output: OutputOverrides,
    },
    /// Report mesh statistics, flipped cells and an aspect-ratio histogram.
    MeshStats { mesh: PathBuf },
}

fn load(path: &PathBuf, o: OutputOverrides) -> CliResult<JobConfig> {
    let mut c = JobConfig::load(path)?;
    c.output.json = o.json.or(c.output.json);
    c.output.csv = o.csv.or(c.output.csv);
    c.output.vtk = o.vtk.or(c.output.vtk);
    Ok(c)
}

fn json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("outputs serialize")
}

fn execute(cli: Cli) -> CliResult<String> {
    match cli.command {
        Command::Run { config, output } => Ok(json(&commands::run(&load(&config, output)?)?)),
        Command::Converge { config, levels, output } => Ok(json(&commands::converge(&load(&config, output)?, levels)?)),
        Command::MeshStats { mesh } => Ok(json(&commands::mesh_stats(&mesh)?)),
    }
}

fn configure_threads() -> CliResult<()> {
    if let Ok(v) = std::env::var("FEMBENCH_THREADS") {
        let n = v
            .parse()
            .map_err(|_| CliError::Config(format!("FEMBENCH_THREADS must be a count, got {v:?}")))?;
        fembench::solve::set_thread_count(n);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|_| execute(cli)) {
        Ok(out) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
