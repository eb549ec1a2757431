use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qdiscord_cli::{commands, Format, OracleArgs};

#[derive(Parser, Debug)]
#[command(name = "qdiscord", version, about = "Trace-norm geometric discord of two-qubit states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Discord of the states in one or more JSON files.
    Compute {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[command(flatten)]
        oracle: OracleArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Record the wall time per state (makes output non-reproducible).
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate a state family over a parameter grid.
    Sweep {
        #[arg(long)]
        family: String,
        /// PARAM=a:b:step; repeat for a product grid. `pi` is accepted, e.g. 0:pi/2:0.01.
        #[arg(long = "range", value_name = "PARAM=a:b:step")]
        ranges: Vec<String>,
        /// PARAM=value held fixed.
        #[arg(long = "set", value_name = "PARAM=value")]
        fixed: Vec<String>,
        /// Draw this many uniform random points inside the ranges instead of the grid.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        oracle: OracleArgs,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify the closed form against the oracle on random states and family fixtures.
    Certify {
        #[arg(long, default_value_t = 500)]
        n_states: usize,
        #[arg(long, default_value_t = commands::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 20_000)]
        grid: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Compute {
            files,
            oracle,
            format,
            timing,
            out,
        } => commands::compute(&files, &oracle, format, timing, out.as_deref()),
        Command::Sweep {
            family,
            ranges,
            fixed,
            samples,
            seed,
            oracle,
            format,
            out,
        } => commands::sweep(
            &commands::SweepArgs {
                family,
                ranges,
                fixed,
                samples,
                seed,
                oracle,
            },
            format,
            out.as_deref(),
        ),
        Command::Certify {
            n_states,
            seed,
            grid,
            tol,
            format,
            out,
        } => commands::certify(n_states, seed, grid, tol, format, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qdiscord: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
