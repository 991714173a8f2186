use std::path::PathBuf;
use std::process::ExitCode;

use cdci_cli::commands::{
    cmd_calibrate, cmd_evaluate, cmd_predict, cmd_synth, CalibrateArgs, EvaluateArgs, PredictArgs,
    SynthArgs,
};
use cdci_cli::sweep::cmd_sweep;
use cdci_cli::CliResult;
use clap::{Parser, Subcommand};

/// Conformal credal sets for edge/cloud classifier pairs.
#[derive(Debug, Parser)]
#[command(name = "cdci", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute the conformal radius from calibration pairs.
    Calibrate(CalibrateArgs),
    /// Build credal sets and point predictions for edge outputs.
    Predict(PredictArgs),
    /// Report coverage, inefficiency, accuracy and ECE on labelled pairs.
    Evaluate(EvaluateArgs),
    /// Run a sweep described by a JSON spec file.
    Sweep { spec: PathBuf },
    /// Write synthetic edge/cloud pairs.
    Synth(SynthArgs),
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Calibrate(args) => cmd_calibrate(&args).map(drop),
        Command::Predict(args) => cmd_predict(&args).map(drop),
        Command::Evaluate(args) => cmd_evaluate(&args).map(drop),
        Command::Sweep { spec } => cmd_sweep(&spec).map(drop),
        Command::Synth(args) => cmd_synth(&args).map(drop),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
