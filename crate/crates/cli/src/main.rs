mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{CliError, Run};
use config::{Format, RunConfig};

#[derive(Parser)]
#[command(name = "loopcurve", version, about = "Loop equations, finite-N checks and spectral curves of two-matrix models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Run configuration (JSON, "schema": 1).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for stochastic commands; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; overrides the config (default: current directory).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Symbolic loop equations for words and generating families.
    Derive,
    /// Finite-N master-equation residuals.
    Verify,
    /// Large-N spectral curve and density.
    SolveCurve,
    /// Residue and boundedness checks on the solved curve.
    Residues,
    /// Comparison with the model with the matrices exchanged.
    Duality,
}

fn threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("LOOPCURVE_THREADS") else {
        return Ok(());
    };
    let n: usize = value.parse().ok().filter(|&n| n > 0).ok_or_else(|| CliError::validation(format!("LOOPCURVE_THREADS={value:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::validation(e.to_string()))
}

fn prepare(cli: &Cli) -> Result<Run, CliError> {
    let path = cli.config.as_ref().ok_or_else(|| CliError::validation("--config is required"))?;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
    let config = RunConfig::parse(&text).map_err(CliError::validation)?;
    let model = config.model.to_model().map_err(CliError::validation)?;
    let output = config.output.clone().unwrap_or(config::OutputConfig { dir: None, format: None });
    Ok(Run {
        seed: cli.seed.or(config.seed),
        out: cli.out.clone().or(output.dir.map(PathBuf::from)).unwrap_or_else(|| PathBuf::from(".")),
        format: cli.format.or(output.format).unwrap_or(Format::Json),
        model,
        config,
    })
}

fn run(cli: &Cli) -> Result<i32, CliError> {
    threads()?;
    let r = prepare(cli)?;
    r.write("config.json", &r.config.to_json())?;
    match cli.command {
        Command::Derive => commands::derive(&r),
        Command::Verify => commands::verify(&r),
        Command::SolveCurve => commands::solve_curve(&r),
        Command::Residues => commands::residues(&r),
        Command::Duality => commands::duality(&r),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => {
            if code == commands::EXIT_GATE {
                eprintln!("gate failed; report written");
            }
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
