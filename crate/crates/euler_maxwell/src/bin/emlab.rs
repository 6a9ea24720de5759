use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use euler_maxwell::cli::{emit, parse_config, run_experiment, CliError, Experiment};

/// Runs one experiment of the two-fluid Euler-Maxwell lab and writes a CSV table.
#[derive(Debug, Parser)]
#[command(name = "emlab", version)]
struct Args {
    /// darcy-check, fluid-spectrum, em-spectrum, em-error, lyapunov-check,
    /// linear-decay, profile-convergence, special-data or nonlinear-run
    experiment: String,
    /// TOML config file
    #[arg(long)]
    config: PathBuf,
    /// Output CSV; overrides `output` in the config, stdout if neither is set
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides `seed` in the config
    #[arg(long)]
    seed: Option<u64>,
}

fn run(args: &Args) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::IoFailure(format!("{}: {e}", args.config.display())))?;
    let mut cfg = parse_config(&text)?;
    let named = Experiment::from_name(&args.experiment).ok_or_else(|| CliError::TypeMismatch {
        key: "experiment".into(),
        expected: "a known experiment name".into(),
        line: None,
    })?;
    if named != cfg.experiment {
        return Err(CliError::TypeMismatch {
            key: "experiment".into(),
            expected: format!("`{}` to match the command line", cfg.experiment.name()),
            line: None,
        });
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.output = Some(out.display().to_string());
    }
    let table = run_experiment(&cfg)?;
    match &cfg.output {
        Some(path) => emit(&table, path.as_ref()),
        None => {
            print!("{}", table.to_csv());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("emlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
