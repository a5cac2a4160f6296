//! `rotlab`: batch front end for representation building, obstruction
//! reports, repair searches and the validation sweeps.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "rotlab",
    version,
    about = "Almost rotation-commuting unitary tuples: invariants and repair"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// JSON file overriding tolerance defaults.
    #[arg(long, global = true)]
    tol_config: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output directory, created if missing.
    #[arg(short, long, global = true, default_value = ".")]
    out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Both)]
    format: Format,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Both,
}

impl Format {
    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }

    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write an exact clock/shift representation.
    Rep(commands::RepArgs),
    /// Obstruction report for a tuple; exit 0 unobstructed, 2 obstructed, 3 indeterminate.
    Obstruct(commands::ObstructArgs),
    /// Randomized trace-formula validation; exit 1 if any case fails.
    ExelSuite(commands::ExelSuiteArgs),
    /// Repair a tuple towards exact relations.
    Repair(commands::RepairArgs),
    /// Spin-triple sweep with index certificates.
    Counterexample(commands::CounterexampleArgs),
    /// Gap calibration table for the Rieffel element.
    Calibrate(commands::CalibrateArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Rep(a) => commands::rep(&cli.global, a),
        Command::Obstruct(a) => commands::obstruct(&cli.global, a),
        Command::ExelSuite(a) => commands::exel_suite(&cli.global, a),
        Command::Repair(a) => commands::repair(&cli.global, a),
        Command::Counterexample(a) => commands::counterexample(&cli.global, a),
        Command::Calibrate(a) => commands::calibrate(&cli.global, a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
