//! `fpsearch`: phase schedules, simulations, sweeps and invariant checks.

mod commands;
mod output;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use fpsearch::Mode;

use crate::output::CliError;

#[derive(Parser)]
#[command(name = "fpsearch", version, about = "Fixed-point quantum search schedules and simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Amplify,
    Avoid,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Amplify => Mode::Amplify,
            ModeArg::Avoid => Mode::Avoid,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    #[value(name = "2d")]
    TwoLevel,
    Direct,
    Circuit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Reference {
    #[value(name = "closed_form")]
    ClosedForm,
    Grover,
    Pi3,
}

#[derive(Subcommand)]
enum Command {
    /// Print the phase schedule of an L = 2l+1 sequence.
    Phases {
        /// Number of generalized Grover iterates.
        #[arg(long)]
        l: usize,
        /// Error bound squared: success is at least 1 - delta_sq above the width.
        #[arg(long)]
        delta_sq: f64,
        #[arg(long, value_enum, default_value = "amplify")]
        mode: ModeArg,
        /// Outer iterate counts, nested left to right around `--l`.
        #[arg(long, value_delimiter = ',')]
        nest: Vec<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Minimal odd L whose width does not exceed lambda0.
    Minl {
        #[arg(long)]
        delta_sq: f64,
        #[arg(long)]
        lambda0: f64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Tabulate success probabilities over a grid of overlaps.
    Sweep {
        #[arg(long)]
        delta_sq: f64,
        /// Iterate counts of the fixed-point curves.
        #[arg(long, value_delimiter = ',', required = true)]
        l: Vec<usize>,
        #[arg(long, default_value_t = 0.01)]
        lambda_min: f64,
        #[arg(long, default_value_t = 1.0)]
        lambda_max: f64,
        #[arg(long, default_value_t = 100)]
        points: usize,
        #[arg(long, value_enum, default_value = "linear")]
        spacing: Spacing,
        /// Extra curves: closed_form, grover, pi3.
        #[arg(long = "refs", value_enum, value_delimiter = ',', default_value = "closed_form")]
        references: Vec<Reference>,
        /// Recursion levels of the pi3 curves.
        #[arg(long, value_delimiter = ',', default_value = "2")]
        pi3_k: Vec<u32>,
        /// Output file; a `.meta.json` sidecar is written next to it.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Run a schedule on a uniform search instance.
    #[command(group(ArgGroup::new("targets").required(true).args(["marked", "num_marked"])))]
    Simulate {
        /// Register qubits.
        #[arg(long)]
        n: usize,
        /// Marked basis indices.
        #[arg(long, value_delimiter = ',')]
        marked: Vec<usize>,
        /// Mark indices 0..m-1.
        #[arg(long)]
        num_marked: Option<usize>,
        #[arg(long)]
        l: usize,
        #[arg(long, default_value_t = 0.1)]
        delta_sq: f64,
        #[arg(long, value_enum, default_value = "direct")]
        engine: EngineArg,
        #[arg(long, value_enum, default_value = "amplify")]
        mode: ModeArg,
        /// Write the final statevector here (direct and circuit engines).
        #[arg(long)]
        dump: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Run the invariant suites.
    #[command(group(ArgGroup::new("profile").args(["quick", "full"])))]
    Verify {
        /// Coarse grid (default).
        #[arg(long)]
        quick: bool,
        /// Acceptance grid.
        #[arg(long)]
        full: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Phases { l, delta_sq, mode, nest, format } => {
            commands::phases(l, delta_sq, mode.into(), &nest, format)
        }
        Command::Minl { delta_sq, lambda0, format } => commands::minl(delta_sq, lambda0, format),
        Command::Sweep { delta_sq, l, lambda_min, lambda_max, points, spacing, references, pi3_k, out, format } => {
            let spec = sweep::SweepSpec::new(delta_sq, l, lambda_min, lambda_max, points, spacing, references, pi3_k)?;
            sweep::run(&spec, out.as_deref(), format)
        }
        Command::Simulate { n, marked, num_marked, l, delta_sq, engine, mode, dump, format } => {
            let targets = match num_marked {
                Some(m) => commands::Targets::First(m),
                None => commands::Targets::List(marked),
            };
            commands::simulate(n, targets, l, delta_sq, engine, mode.into(), dump.as_deref(), format)
        }
        Command::Verify { full, format, .. } => commands::verify(if full { "full" } else { "quick" }, format),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
