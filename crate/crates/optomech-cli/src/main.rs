//! `optomech`: element tables, single-point evaluations, membrane-in-the-middle
//! scans and model comparisons driven by a TOML configuration file.

mod commands;
mod config;
mod output;

use clap::{Parser, Subcommand};
use commands::CliError;
use config::{load, parse_grid};
use optomech::mim::ScanGrid;
use output::{Format, Sink};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "optomech",
    version,
    about = "One-dimensional transfer-matrix optomechanics",
    after_help = config::CONFIG_KEYS
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Configuration file (TOML).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Output file; stdout when absent. Written atomically.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Worker threads for scans (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    /// Grid override: x0,x1,nx,dlc0,dlc1,ndlc (lengths take unit suffixes).
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_grid)]
    grid: Option<ScanGrid>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Reflection, transmission and absorption of every element in [chain].
    Elements,
    /// Fields, force, friction, diffusion and temperature for [chain].
    Point,
    /// Membrane-in-the-middle scan over [grid].
    Scan,
    /// Transfer-matrix versus coupled-cavities static force over [grid].
    Compare,
    /// Resonance shifts and optomechanical couplings over grid.x.
    Couplings,
    /// Check the configuration and print it with all defaults resolved.
    Validate,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let path = cli
        .config
        .ok_or_else(|| CliError::Config("  - --config FILE is required".into()))?;
    let cfg = load(&path, cli.grid).map_err(|e| CliError::Config(format!("  - {e}")))?;
    let sink = Sink {
        out: cli.out,
        format: cli.format,
    };
    match cli.command {
        Command::Elements => commands::elements(&cfg, &sink),
        Command::Point => commands::point(&cfg, &sink),
        Command::Scan => commands::scan_cmd(&cfg, &sink, cli.workers),
        Command::Compare => commands::compare(&cfg, &sink, cli.workers),
        Command::Couplings => commands::couplings_cmd(&cfg, &sink),
        Command::Validate => commands::validate(&cfg, &sink),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
