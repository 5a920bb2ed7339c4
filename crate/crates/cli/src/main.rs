use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use monopole_lab::{run, CliError, Experiment, RunConfig};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    Simulate,
    Verify,
    Probe,
    Norms,
    Convergence,
    Scaling,
    ExistenceTime,
}

impl From<Command> for Experiment {
    fn from(c: Command) -> Self {
        match c {
            Command::Simulate => Experiment::Simulate,
            Command::Verify => Experiment::Verify,
            Command::Probe => Experiment::Probe,
            Command::Norms => Experiment::Norms,
            Command::Convergence => Experiment::Convergence,
            Command::Scaling => Experiment::Scaling,
            Command::ExistenceTime => Experiment::ExistenceTime,
        }
    }
}

/// Pseudospectral monopole solver and null-form laboratory.
#[derive(Debug, Parser)]
#[command(name = "monopole-lab", version)]
struct Args {
    /// Experiment to run.
    #[arg(value_enum)]
    command: Command,
    /// Run configuration (`key = value` lines).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides `seed` from the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `out` from the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("monopole-lab: {}", e.message());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(args: &Args) -> Result<i32, CliError> {
    let mut config = match &args.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(out) = &args.out {
        config.out = out.clone();
    }
    let experiment = Experiment::from(args.command);
    let outcome = run(experiment, &config)?;
    println!("{}: exit {} ({})", experiment.name(), outcome.exit_code, outcome.summary.display());
    Ok(outcome.exit_code)
}
