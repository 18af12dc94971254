use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use fracns::cli::{exit_code, parse_config, run, write_outcome, ExitStatus, Subcommand};
use fracns::Error;

/// Spectral-Galerkin laboratory for time-fractional stochastic
/// Navier-Stokes-type equations.
#[derive(Debug, Parser)]
#[command(name = "fracns", version)]
struct Args {
    #[arg(value_enum)]
    subcommand: Subcommand,
    /// TOML experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides `run.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides `run.output_path`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run even when the exponent conditions fail.
    #[arg(long)]
    override_validation: bool,
}

fn execute(args: &Args) -> Result<bool, Error> {
    let text = std::fs::read_to_string(&args.config).map_err(|e| Error::Io {
        path: args.config.display().to_string(),
        message: e.to_string(),
    })?;
    let mut cfg = parse_config(&text)?;
    if let Some(seed) = args.seed {
        cfg.config.run.seed = seed;
    }
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(&cfg.config.run.output_path));
    let outcome = run(args.subcommand, &cfg, args.override_validation)?;
    print!("{}", outcome.summary);
    for path in write_outcome(&outcome, &out)? {
        println!("wrote {}", path.display());
    }
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let status = match execute(&args) {
        Ok(true) => ExitStatus::Passed,
        Ok(false) => ExitStatus::ChecksFailed,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    };
    ExitCode::from(status as u8)
}
