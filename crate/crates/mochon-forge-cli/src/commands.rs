//! Subcommand bodies. Each returns an [`Outcome`]; nothing is written until
//! [`Outcome::emit`].

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use mochon_forge::compiler::{count_rounds, resource_report, CompileError};
use mochon_forge::ladder::{build_tipg_from, find_min_alpha, LadderError, LadderParams, LadderReport};
use mochon_forge::numeric::rational::{format_rational, int, parse_rational};
use mochon_forge::pointgame::FORMAT_VERSION;
use mochon_forge::protocol::{extract_point_game, ExtractOptions};
use mochon_forge::{
    check_point_game, check_tipg, emit_protocol, simulate_honest, tipg_to_sequential, verify_dual_feasibility, PointGame,
    ProtocolDescription, ProtocolError, Rational, Tipg,
};

use crate::render;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Malformed { path: String, message: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    /// A library call refused its input for mathematical reasons.
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Malformed { .. } => "malformed_input",
            CliError::Io { .. } => "io",
            CliError::Failed(_) => "failed",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            _ => 2,
        }
    }
}

/// A report for stdout, an optional artifact, and the failed check if any.
pub struct Outcome {
    report: Value,
    artifact: Option<(Option<PathBuf>, String)>,
    pub failure: Option<String>,
}

impl Outcome {
    fn report(report: Value) -> Self {
        Outcome {
            report,
            artifact: None,
            failure: None,
        }
    }

    fn with_artifact(mut self, out: Option<&Path>, body: String) -> Self {
        self.artifact = Some((out.map(Path::to_path_buf), body));
        self
    }

    fn failing_if(mut self, failed: bool, message: impl Into<String>) -> Self {
        if failed {
            self.failure = Some(message.into());
        }
        self
    }

    /// Writes the artifact to its file and the report to stdout, or the
    /// artifact alone to stdout when it has no file.
    pub fn emit(&self) -> Result<(), CliError> {
        match &self.artifact {
            Some((None, body)) => print_stdout(body),
            Some((Some(path), body)) => {
                write_file(path, &format!("{body}\n"))?;
                print_report(&self.report)
            }
            None => print_report(&self.report),
        }
    }
}

fn print_report(v: &Value) -> Result<(), CliError> {
    print_stdout(&serde_json::to_string_pretty(v).expect("JSON values serialize"))
}

/// A closed stdout (for example `| head`) is not an error.
fn print_stdout(body: &str) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{body}").and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Io {
            path: "<stdout>".into(),
            source: e,
        }),
        _ => Ok(()),
    }
}

pub fn write_file(path: &Path, body: &str) -> Result<(), CliError> {
    std::fs::write(path, body).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Report value with `"format": 1` at the top level. Object keys come out
/// sorted, so output is byte-stable.
fn tagged<T: Serialize>(v: &T) -> Value {
    let mut v = serde_json::to_value(v).expect("reports serialize");
    if let Value::Object(m) = &mut v {
        m.entry("format").or_insert(json!(FORMAT_VERSION));
    }
    v
}

fn artifact<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("artifacts serialize")
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::Malformed {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn parse_flag(name: &str, s: &str) -> Result<Rational, CliError> {
    parse_rational(s).map_err(|e| CliError::Usage(format!("--{name}: {e}")))
}

fn check_tol(tol: f64) -> Result<(), CliError> {
    if tol > 0.0 && tol < 1.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--tol must lie in (0, 1), got {tol}")))
    }
}

fn ladder_error(e: LadderError) -> CliError {
    match e {
        LadderError::InvalidParams(m) => CliError::Usage(m),
        other => CliError::Failed(other.to_string()),
    }
}

fn compile_error(e: CompileError) -> CliError {
    match e {
        CompileError::InfeasibleEpsilon(_) => CliError::Usage(e.to_string()),
        other => CliError::Failed(other.to_string()),
    }
}

fn protocol_error(e: ProtocolError) -> CliError {
    match e {
        ProtocolError::Malformed(m) => CliError::Usage(m),
        other => CliError::Failed(other.to_string()),
    }
}

pub fn ladder(
    k: u32,
    omega: &str,
    gamma: u64,
    zeta: Option<u64>,
    search: bool,
    check: bool,
    out: Option<&Path>,
) -> Result<Outcome, CliError> {
    let omega = parse_flag("omega", omega)?;
    let params = match (zeta, search) {
        (_, true) => find_min_alpha(k, &omega, gamma).map_err(ladder_error)?.params,
        (Some(z), false) => LadderParams::new(k, omega, gamma, z).map_err(ladder_error)?,
        (None, false) => return Err(CliError::Usage("pass --zeta or --search-alpha".into())),
    };
    let t = build_tipg_from(&params).map_err(ladder_error)?;
    let mut report = tagged(&LadderReport::new(&params, &t));
    let mut failed = false;
    if check {
        let r = check_tipg(&t);
        failed = !r.passed();
        report["tipg_status"] = json!(r.status);
    }
    Ok(Outcome::report(report)
        .with_artifact(out, artifact(&t))
        .failing_if(failed, "TIPG check failed"))
}

pub fn verify(input: &Path) -> Result<Outcome, CliError> {
    let g: PointGame = read_json(input)?;
    let r = check_point_game(&g);
    let n = r.failures.len();
    Ok(Outcome::report(tagged(&r)).failing_if(!r.passed(), format!("{n} failures")))
}

pub fn verify_tipg(input: &Path) -> Result<Outcome, CliError> {
    let t: Tipg = read_json(input)?;
    let r = check_tipg(&t);
    let n = r.failures.len();
    let identity = r.identity_residual.is_empty();
    Ok(Outcome::report(tagged(&r)).failing_if(
        !r.passed(),
        format!("{n} failing lines, identity holds: {identity}"),
    ))
}

pub fn compile(input: &Path, epsilon: &str, count_only: bool, check: bool, out: Option<&Path>) -> Result<Outcome, CliError> {
    let t: Tipg = read_json(input)?;
    let eps = parse_flag("epsilon", epsilon)?;
    if eps <= int(0) {
        return Err(CliError::Usage(format!("--epsilon must be positive, got {}", format_rational(&eps))));
    }
    if count_only {
        let c = count_rounds(&t, &eps).map_err(compile_error)?;
        return Ok(Outcome::report(tagged(&c)));
    }
    let (g, plan) = tipg_to_sequential(&t, &eps).map_err(compile_error)?;
    let mut report = tagged(&plan);
    let mut failed = false;
    if check {
        let r = check_point_game(&g);
        failed = !r.passed();
        report["game_status"] = json!(r.status);
    }
    Ok(Outcome::report(report)
        .with_artifact(out, artifact(&g))
        .failing_if(failed, "compiled game check failed"))
}

pub fn emit(input: &Path, out: Option<&Path>) -> Result<Outcome, CliError> {
    let g: PointGame = read_json(input)?;
    let p = emit_protocol(&g).map_err(protocol_error)?;
    let active = p.rounds.iter().filter(|r| r.source_transition.is_some()).count();
    let lay = p.layout();
    let report = json!({
        "format": FORMAT_VERSION,
        "rounds": p.num_rounds(),
        "active_rounds": active,
        "dims": { "a": lay.dim_a(), "m": lay.dim_m(), "b": lay.dim_b() },
        "lambda": p.lambda,
        "s_a": p.s_a.iter().map(format_rational).collect::<Vec<_>>(),
        "s_b": p.s_b.iter().map(format_rational).collect::<Vec<_>>(),
    });
    Ok(Outcome::report(report).with_artifact(out, artifact(&p)))
}

pub fn verify_protocol(input: &Path, tol: f64) -> Result<Outcome, CliError> {
    check_tol(tol)?;
    let p: ProtocolDescription = read_json(input)?;
    let r = verify_dual_feasibility(&p, tol);
    let n = r.failures;
    Ok(Outcome::report(tagged(&r)).failing_if(!r.passed, format!("{n} constraint checks failed")))
}

pub fn extract(input: &Path, out: Option<&Path>) -> Result<Outcome, CliError> {
    let p: ProtocolDescription = read_json(input)?;
    let ex = extract_point_game(&p, &ExtractOptions::default()).map_err(protocol_error)?;
    let mut report = tagged(&ex);
    report["transitions"] = json!(ex.game.num_transitions());
    Ok(Outcome::report(report).with_artifact(out, artifact(&ex.game)))
}

pub fn simulate(input: &Path, tol: f64) -> Result<Outcome, CliError> {
    check_tol(tol)?;
    let p: ProtocolDescription = read_json(input)?;
    let r = simulate_honest(&p);
    let failed = r.correctness_residual > tol || r.max_honest_deviation > tol;
    let mut report = tagged(&r);
    report["tol"] = json!(tol);
    Ok(Outcome::report(report).failing_if(failed, "honest run deviates beyond tol"))
}

pub fn report(input: &Path) -> Result<Outcome, CliError> {
    let g: PointGame = read_json(input)?;
    Ok(Outcome::report(tagged(&resource_report(&g))))
}

pub fn render(input: &Path, out_dir: &Path, extent: Option<&str>) -> Result<Outcome, CliError> {
    let g: PointGame = read_json(input)?;
    let extent = match extent {
        Some(s) => {
            let e = parse_flag("extent", s)?;
            if e <= int(0) {
                return Err(CliError::Usage("--extent must be positive".into()));
            }
            e
        }
        None => render::default_extent(&g),
    };
    std::fs::create_dir_all(out_dir).map_err(|source| CliError::Io {
        path: out_dir.display().to_string(),
        source,
    })?;
    let mut files = Vec::new();
    let mut downsampled = Vec::new();
    for (i, f) in g.frames().iter().enumerate() {
        let frame = render::render_frame(f, &extent, i);
        let name = format!("frame_{i:04}.svg");
        write_file(&out_dir.join(&name), &frame.svg)?;
        if frame.shown < f.len() {
            downsampled.push(json!({ "frame": i, "points": f.len(), "shown": frame.shown }));
        }
        files.push(name);
    }
    Ok(Outcome::report(json!({
        "format": FORMAT_VERSION,
        "extent": format_rational(&extent),
        "frames": files.len(),
        "files": files,
        "downsampled": downsampled,
    })))
}
