//! `mochon-forge` command-line front end.
//!
//! Reports go to stdout as JSON; artifacts go to `--out` (or stdout when no
//! `--out` is given). Exit status is 0 when every check passes, 1 on a
//! failed check and 2 on malformed input. Errors are written to stderr as
//! `{"format": 1, "error": {"kind", "message"}}`.

mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use commands::Outcome;

#[derive(Parser)]
#[command(name = "mochon-forge", version, about = "Exact point-game construction, verification and compilation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the ladder TIPG for (k, omega, gamma) and a final index zeta
    Ladder(LadderArgs),
    /// Check every transition of a sequential point game
    Verify(InputArgs),
    /// Check both functions of a TIPG and its identity
    VerifyTipg(InputArgs),
    /// Compile a TIPG into a sequential point game with final point shifted by epsilon
    Compile(CompileArgs),
    /// Emit a protocol description from an exactly valid rational game
    Emit(ArtifactArgs),
    /// Numerically verify the dual certificate of a protocol
    VerifyProtocol(TolArgs),
    /// Recover a point game from a protocol's duals and honest states
    Extract(ArtifactArgs),
    /// Run the honest protocol and report outcome probabilities
    Simulate(TolArgs),
    /// Qubit and round counts of a point game
    Report(InputArgs),
    /// Write one SVG per frame of a point game
    Render(RenderArgs),
}

#[derive(Args)]
struct LadderArgs {
    #[arg(long)]
    k: u32,
    /// Grid step, as p/q or an integer
    #[arg(long)]
    omega: String,
    /// Top rung index
    #[arg(long)]
    gamma: u64,
    /// Final index; alpha = zeta * omega
    #[arg(long, conflicts_with = "search_alpha")]
    zeta: Option<u64>,
    /// Use the least admissible zeta
    #[arg(long)]
    search_alpha: bool,
    /// Also run the exact TIPG check
    #[arg(long)]
    check: bool,
    /// Where to write the TIPG
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InputArgs {
    input: PathBuf,
}

#[derive(Args)]
struct ArtifactArgs {
    input: PathBuf,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompileArgs {
    input: PathBuf,
    /// Final-point shift, as p/q or an integer
    #[arg(long)]
    epsilon: String,
    /// Only count transitions; do not build frames
    #[arg(long)]
    count_only: bool,
    /// Also run the exact game check on the output
    #[arg(long)]
    check: bool,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TolArgs {
    input: PathBuf,
    /// Numerical tolerance in (0, 1)
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args)]
struct RenderArgs {
    input: PathBuf,
    /// Directory for frame_NNNN.svg files
    #[arg(long)]
    out_dir: PathBuf,
    /// Coordinate shown at the right and top edges; defaults to the largest coordinate
    #[arg(long)]
    extent: Option<String>,
}

fn configure_threads() -> Result<(), commands::CliError> {
    let Ok(v) = std::env::var("MOCHON_FORGE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| commands::CliError::Usage(format!("MOCHON_FORGE_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| commands::CliError::Usage(e.to_string()))
}

fn dispatch(cmd: Command) -> Result<Outcome, commands::CliError> {
    match cmd {
        Command::Ladder(a) => commands::ladder(a.k, &a.omega, a.gamma, a.zeta, a.search_alpha, a.check, a.out.as_deref()),
        Command::Verify(a) => commands::verify(&a.input),
        Command::VerifyTipg(a) => commands::verify_tipg(&a.input),
        Command::Compile(a) => commands::compile(&a.input, &a.epsilon, a.count_only, a.check, a.out.as_deref()),
        Command::Emit(a) => commands::emit(&a.input, a.out.as_deref()),
        Command::VerifyProtocol(a) => commands::verify_protocol(&a.input, a.tol),
        Command::Extract(a) => commands::extract(&a.input, a.out.as_deref()),
        Command::Simulate(a) => commands::simulate(&a.input, a.tol),
        Command::Report(a) => commands::report(&a.input),
        Command::Render(a) => commands::render(&a.input, &a.out_dir, a.extent.as_deref()),
    }
}

fn error_json(kind: &str, message: &str) {
    eprintln!("{}", json!({ "format": 1, "error": { "kind": kind, "message": message } }));
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            error_json("usage", e.to_string().trim_end());
            return ExitCode::from(2);
        }
    };
    let result = configure_threads().and_then(|()| dispatch(cli.command));
    match result {
        Ok(outcome) => {
            if let Err(e) = outcome.emit() {
                error_json(e.kind(), &e.to_string());
                return ExitCode::from(e.exit_code());
            }
            match outcome.failure {
                None => ExitCode::SUCCESS,
                Some(msg) => {
                    error_json("check_failed", &msg);
                    ExitCode::from(1)
                }
            }
        }
        Err(e) => {
            error_json(e.kind(), &e.to_string());
            ExitCode::from(e.exit_code())
        }
    }
}
