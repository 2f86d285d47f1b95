use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::builder::PossibleValuesParser;
use clap::error::ErrorKind;
use clap::{Parser, ValueEnum};
use lipext::cli::{exit, instance_text, render, run_path, Command, Format, Options};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

/// Lipschitz extensions into function spaces over finite measure spaces, with
/// brute-force verification of every check.
#[derive(Debug, Parser)]
#[command(name = "lipext", version)]
struct Args {
    /// Command to run.
    #[arg(value_parser = PossibleValuesParser::new(Command::ALL.map(|c| c.name())))]
    command: String,
    /// JSON instance file.
    instance: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Tolerance for instance checks (default 1e-9 for exact checks, 1e-6 for optimized ones).
    #[arg(long)]
    tolerance: Option<f64>,
    /// Largest atom count accepted (hard cap 20).
    #[arg(long, default_value_t = 12)]
    max_atoms: usize,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    /// Seed for the randomized suites of verify-all (default: the instance seed, else 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Cases per randomized suite in verify-all.
    #[arg(long, default_value_t = 10)]
    suite_cases: usize,
    /// Include wall-clock time in the report.
    #[arg(long)]
    timing: bool,
    /// For extension commands, write the extended map as a new instance.
    #[arg(long)]
    emit_instance: Option<PathBuf>,
}

fn write_out(path: Option<&PathBuf>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(exit::USAGE as u8),
            };
        }
    };
    let format = match args.format {
        FormatArg::Json => Format::Json,
        FormatArg::Csv => Format::Csv,
    };
    let opts = Options {
        tolerance: args.tolerance,
        max_atoms: args.max_atoms,
        format,
        timing: args.timing,
        seed: args.seed,
        suite_cases: args.suite_cases,
    };
    let outcome = run_path(&args.command, &args.instance, &opts);
    if let Err(e) = write_out(args.out.as_ref(), &render(&outcome.report, format)) {
        eprintln!("lipext: cannot write report: {e}");
        return ExitCode::from(exit::DATA as u8);
    }
    if let Some(path) = &args.emit_instance {
        match &outcome.emitted {
            Some(raw) => {
                if let Err(e) = std::fs::write(path, instance_text(raw)) {
                    eprintln!("lipext: cannot write instance: {e}");
                    return ExitCode::from(exit::DATA as u8);
                }
            }
            None if outcome.code == exit::OK || outcome.code == exit::CHECK_FAILED => {
                eprintln!("lipext: {} does not produce an extended map", args.command);
            }
            None => {}
        }
    }
    if let Some(e) = &outcome.report.error {
        eprintln!("lipext: {}", e.message);
    }
    ExitCode::from(outcome.code as u8)
}
