use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use bbw::{run, Command, Request};
use clap::{Args, Parser, Subcommand};

/// Refinable broken bases and their wavelet transforms on nonequispaced knots.
#[derive(Parser)]
#[command(name = "bbw", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample the basis of one level as CSV.
    Basis(Common),
    /// Sample the wavelets between levels j and j+1 as CSV.
    Wavelets(Common),
    /// Dump refinement matrices and lifting schemes as JSON.
    Refine(Common),
    /// Project a target function and write the pointwise error as CSV.
    Project(Common),
    /// Forward transform of finest-level coefficients.
    Forward(Common),
    /// Inverse transform of a coefficient pyramid.
    Inverse(Common),
    /// Run the numerical checks for a configuration.
    Check(Common),
}

#[derive(Args)]
struct Common {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Level index.
    #[arg(long)]
    level: Option<usize>,
    /// Input data file.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Number of sample points, overriding the configuration.
    #[arg(long)]
    samples: Option<usize>,
    /// Projection target as a JSON function descriptor.
    #[arg(long)]
    target: Option<String>,
    /// Multiplies every check tolerance.
    #[arg(long, env = "BBW_TOLERANCE_SCALE", default_value_t = 1.0)]
    tolerance_scale: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, c) = match cli.command {
        Cmd::Basis(c) => (Command::Basis, c),
        Cmd::Wavelets(c) => (Command::Wavelets, c),
        Cmd::Refine(c) => (Command::Refine, c),
        Cmd::Project(c) => (Command::Project, c),
        Cmd::Forward(c) => (Command::Forward, c),
        Cmd::Inverse(c) => (Command::Inverse, c),
        Cmd::Check(c) => (Command::Check, c),
    };
    let req = Request {
        command,
        config: c.config,
        level: c.level,
        data: c.data,
        out: c.out,
        samples: c.samples,
        target: c.target,
        tolerance_scale: c.tolerance_scale,
    };
    match run(&req) {
        Ok(outcome) => {
            let written = match &req.out {
                Some(path) => std::fs::write(path, &outcome.output)
                    .map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => std::io::stdout()
                    .write_all(outcome.output.as_bytes())
                    .map_err(|e| format!("cannot write output: {e}")),
            };
            if let Err(msg) = written {
                eprintln!("error: {msg}");
                return ExitCode::from(2);
            }
            for note in &outcome.notes {
                eprintln!("{note}");
            }
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
