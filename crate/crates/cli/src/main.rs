use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cellgeom_cli::commands::{self, DEFAULT_SIGMA_DB};
use cellgeom_cli::{write_atomically, RunConfig};

const EXIT_USAGE: u8 = 2;
const EXIT_NUMERIC: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(
    name = "cellgeom",
    version,
    about = "Typical-user SIR/SINR and energy-efficiency tables for cellular networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Empirical SIR CDF of the configured network vs the Poisson law.
    FigSir(Common),
    /// SINR CDFs: lattice with and without shadowing, finite and infinite Poisson.
    FigSinr(Common),
    /// Mean energy efficiency against transmit power.
    FigEnergy(Common),
    /// Kolmogorov-Smirnov pass fraction against shadowing strength.
    Converge(Common),
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct Common {
    #[arg(long, value_name = "FILE")]
    config: PathBuf,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Overrides the seed of the config file.
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated shadowing strengths for `converge`.
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    sigma_db: Option<Vec<f64>>,
    /// Comma-separated transmit powers for `fig-energy`.
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    p_grid_dbm: Option<Vec<f64>>,
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("cellgeom: {msg}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (args, command) = match &cli.command {
        Command::FigSir(a) => (a, "fig-sir"),
        Command::FigSinr(a) => (a, "fig-sinr"),
        Command::FigEnergy(a) => (a, "fig-energy"),
        Command::Converge(a) => (a, "converge"),
    };
    if args.sigma_db.is_some() && command != "converge" {
        return fail(EXIT_USAGE, "--sigma-db only applies to converge");
    }
    if args.p_grid_dbm.is_some() && command != "fig-energy" {
        return fail(EXIT_USAGE, "--p-grid-dbm only applies to fig-energy");
    }
    let mut cfg = match RunConfig::from_file(&args.config) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_USAGE, e),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let table = match &cli.command {
        Command::FigSir(_) => commands::fig_sir(&cfg),
        Command::FigSinr(_) => commands::fig_sinr(&cfg),
        Command::FigEnergy(_) => {
            let grid = args.p_grid_dbm.clone().unwrap_or_else(commands::default_power_grid);
            if grid.is_empty() || grid.iter().any(|p| !p.is_finite()) {
                return fail(EXIT_USAGE, "--p-grid-dbm needs finite values");
            }
            commands::fig_energy(&cfg, &grid)
        }
        Command::Converge(_) => {
            let sigmas = args.sigma_db.clone().unwrap_or_else(|| DEFAULT_SIGMA_DB.to_vec());
            commands::converge(&cfg, &sigmas)
        }
    };
    let table = match table {
        Ok(t) => t,
        Err(e @ cellgeom_core::Error::Numeric(_)) => return fail(EXIT_NUMERIC, e),
        Err(e) => return fail(EXIT_USAGE, e),
    };
    if let Err(e) = write_atomically(&args.out, &table.to_csv()) {
        return fail(EXIT_IO, format!("cannot write {}: {e}", args.out.display()));
    }
    ExitCode::SUCCESS
}
