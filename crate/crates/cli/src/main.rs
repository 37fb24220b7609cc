use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use causalq_core::sim::NoiseModel;
use clap::{Args, Parser, Subcommand, ValueEnum};

mod diagnose;
mod output;
mod process;
mod simulate;
mod tables;

/// Exit status for a run that completed and found a violation (or an invalid process).
pub const EXIT_VIOLATION: u8 = 1;
/// Exit status for any operational failure.
pub const EXIT_ERROR: u8 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "causalq",
    version,
    about = "Quantum causal-inference engine: switch simulation, process matrices and causal-rule diagnostics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate the quantum-switch circuit, exactly or by sampling shots.
    Simulate(SimulateArgs),
    /// Check scenarios against the causal rules.
    Diagnose(DiagnoseArgs),
    /// Build, validate and contract process matrices.
    Process {
        #[command(subcommand)]
        command: ProcessCommand,
    },
    /// Published versus computed conditional tables for the switch circuit.
    Tables(TablesArgs),
}

#[derive(Args, Debug, Clone)]
struct SeedArg {
    /// Sampling seed; falls back to CAUSALQ_SEED, then 0.
    #[arg(long, env = "CAUSALQ_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Noiseless circuit (the default when --noise is absent).
    #[arg(long, conflicts_with = "noise")]
    ideal: bool,
    /// Depolarizing strengths `p1,p3`, or `paper` for 0.01,0.03.
    #[arg(long, value_parser = parse_noise)]
    noise: Option<NoiseModel>,
    /// Report the exact distribution without sampling.
    #[arg(long, conflicts_with = "shots")]
    exact: bool,
    #[arg(long, default_value_t = 100_000)]
    shots: u64,
    #[command(flatten)]
    seed: SeedArg,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DiagnoseArgs {
    /// Preset name; without this or --scenario-file the canonical suite runs.
    #[arg(long, conflicts_with = "scenario_file")]
    scenario: Option<String>,
    /// JSON scenario description.
    #[arg(long)]
    scenario_file: Option<PathBuf>,
    /// Depolarizing strengths `p1,p3`, or `paper`.
    #[arg(long, value_parser = parse_noise)]
    noise: Option<NoiseModel>,
    /// Comma-separated rules to check, e.g. `R2,R4`.
    #[arg(long, value_delimiter = ',', default_value = "R1,R2,R3,R4")]
    rules: Vec<String>,
    /// Estimate conditionals from this many shots per setting instead of exactly.
    #[arg(long)]
    shots: Option<u64>,
    #[command(flatten)]
    seed: SeedArg,
    /// Failure probability for sampled thresholds.
    #[arg(long, default_value_t = 0.001)]
    delta: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum ProcessCommand {
    /// Write the switch process matrix for the given control and target preparations.
    BuildSwitch {
        #[arg(long, default_value = "plus")]
        control: String,
        #[arg(long, default_value = "zero")]
        target: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Write a definite-order process matrix.
    BuildFixed {
        /// `ab` for A before B, `ba` for B before A.
        #[arg(long)]
        order: String,
        #[arg(long, default_value = "zero")]
        target: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Check positivity and normalization; exits 1 if the matrix is not a valid process.
    Validate {
        file: PathBuf,
        #[arg(long, default_value_t = causalq_core::tensor::DEFAULT_TOL)]
        tol: f64,
    },
    /// Born probability for local operations plugged into the process.
    Contract {
        file: PathBuf,
        /// `c=<state>`, `Ob=<state|identity>`, `A=<gate>`, `B=<gate>`.
        #[arg(long, value_delimiter = ',')]
        effects: Vec<String>,
    },
}

#[derive(Args, Debug)]
struct TablesArgs {
    #[arg(long, default_value_t = 10_000)]
    shots: u64,
    #[command(flatten)]
    seed: SeedArg,
    /// Noise for the noisy rows; defaults to `paper`.
    #[arg(long, value_parser = parse_noise)]
    noise: Option<NoiseModel>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

fn parse_noise(s: &str) -> Result<NoiseModel> {
    if s.eq_ignore_ascii_case("paper") {
        return Ok(NoiseModel::reference());
    }
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [p1, p3] = parts.as_slice() else {
        bail!("expected `p1,p3` or `paper`, got `{s}`");
    };
    let p1: f64 = p1.parse().with_context(|| format!("bad p1 `{p1}`"))?;
    let p3: f64 = p3.parse().with_context(|| format!("bad p3 `{p3}`"))?;
    Ok(NoiseModel::new(p1, p3)?)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Simulate(a) => simulate::run(a),
        Command::Diagnose(a) => diagnose::run(a),
        Command::Process { command } => process::run(command),
        Command::Tables(a) => tables::run(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noise_parsing() {
        assert_eq!(parse_noise("paper").unwrap(), NoiseModel::reference());
        assert_eq!(
            parse_noise("0.1, 0.2").unwrap(),
            NoiseModel::new(0.1, 0.2).unwrap()
        );
        assert!(parse_noise("0.1").is_err());
        assert!(parse_noise("0.1,x").is_err());
        assert!(parse_noise("0.1,1.5").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
