mod commands;
mod problem;
mod render;
mod verify;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use thiserror::Error;

use problem::{Problem, ProblemFile};

const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("defective configuration: {}", .0.join("; "))]
    Defective(Vec<String>),
    #[error("infeasible exponents: {0}")]
    Infeasible(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 1,
            CliError::Defective(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

/// A finished command: the report and its exit code.
pub struct Outcome {
    pub report: Value,
    pub exit: u8,
    /// Printed to stderr when the exit code is nonzero.
    pub message: Option<String>,
}

impl Outcome {
    pub fn ok(report: Value) -> Self {
        Self { report, exit: 0, message: None }
    }
}

#[derive(Parser)]
#[command(name = "blc", version, about = "Brascamp-Lieb constants: analysis, Gaussian solver and verification suites")]
struct Cli {
    /// Render the report as indented text instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,
    /// Add wall-clock timing to the report (makes output nondeterministic).
    #[arg(long, global = true)]
    timing: bool,
    /// RNG seed; falls back to the problem file, then BLC_SEED.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the configuration, enumerate K_A and compute canonical indices.
    Analyze { file: PathBuf },
    /// Compute D(p) for the exponents in the file.
    Solve { file: PathBuf },
    /// Print the critical-set decomposition tree.
    Decompose { file: PathBuf },
    /// Run a verification suite.
    Verify {
        #[command(subcommand)]
        suite: Suite,
    },
}

#[derive(Subcommand)]
enum Suite {
    /// Monotonicity of the heat-flow functional and its Gaussian limit.
    Heatflow {
        /// Problem file with interior exponents; defaults to the √3/2 triple.
        #[arg(long)]
        problem: Option<PathBuf>,
        #[arg(long, default_value_t = 0.01)]
        t_min: f64,
        #[arg(long, default_value_t = 100.0)]
        t_max: f64,
        #[arg(long, default_value_t = 2)]
        per_decade: usize,
        /// Dissipation sample points per time.
        #[arg(long, default_value_t = 300)]
        samples: usize,
    },
    /// Spherical Young inequality with constant 1.
    Sphere1 {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 20_000)]
        samples: usize,
        /// Check the equality case with constant functions only.
        #[arg(long)]
        constant_functions: bool,
    },
    /// Entropy inequality with constant 2 on shrinking caps.
    Sphere2 {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.03,0.01,0.003")]
        eps_schedule: Vec<f64>,
        #[arg(long, default_value_t = 64)]
        bins: usize,
        #[arg(long, default_value_t = 200_000)]
        samples: usize,
    },
    /// Divergence trial, its control, and the marginal normalization.
    Appendix,
}

fn load(path: &Path) -> Result<Problem, CliError> {
    ProblemFile::read(path)?.into_problem()
}

fn env_seed() -> Result<Option<u64>, CliError> {
    match std::env::var("BLC_SEED") {
        Ok(s) => s.trim().parse().map(Some).map_err(|_| CliError::Parse(format!("BLC_SEED = {s:?} is not an integer"))),
        Err(_) => Ok(None),
    }
}

fn resolve_seed(flag: Option<u64>, file: Option<u64>) -> Result<u64, CliError> {
    Ok(match (flag, file) {
        (Some(s), _) | (None, Some(s)) => s,
        (None, None) => env_seed()?.unwrap_or(DEFAULT_SEED),
    })
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Analyze { file } => commands::analyze(&load(file)?),
        Command::Solve { file } => commands::solve(&load(file)?),
        Command::Decompose { file } => commands::decompose_cmd(&load(file)?),
        Command::Verify { suite } => match suite {
            Suite::Heatflow { problem, t_min, t_max, per_decade, samples } => {
                let p = problem.as_deref().map(load).transpose()?;
                let seed = resolve_seed(cli.seed, p.as_ref().and_then(|p| p.seed))?;
                let opts = verify::HeatflowOptions { t_min: *t_min, t_max: *t_max, per_decade: *per_decade, samples: *samples };
                verify::heatflow(p.as_ref(), &opts, seed)
            }
            Suite::Sphere1 { n, p, trials, samples, constant_functions } => {
                let opts = verify::Sphere1Options {
                    n: *n,
                    p: *p,
                    trials: *trials,
                    samples: *samples,
                    constant_functions: *constant_functions,
                };
                verify::sphere1(&opts, resolve_seed(cli.seed, None)?)
            }
            Suite::Sphere2 { n, eps_schedule, bins, samples } => {
                let opts =
                    verify::Sphere2Options { n: *n, eps_schedule: eps_schedule.clone(), bins: *bins, samples: *samples };
                verify::sphere2(&opts, resolve_seed(cli.seed, None)?)
            }
            Suite::Appendix => verify::appendix(),
        },
    }
}

fn emit(report: &Value, pretty: bool) {
    let text = if pretty {
        render::pretty(report)
    } else {
        serde_json::to_string_pretty(report).expect("report serializes") + "\n"
    };
    // A closed pipe (e.g. `| head`) is not an error worth reporting.
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let echo: Vec<String> = std::env::args().skip(1).collect();
    let start = Instant::now();
    let result = run(&cli);
    let mut outcome = match result {
        Ok(o) => o,
        Err(e) => {
            let report = json!({ "error": e.to_string(), "kind": format!("{e:?}").split('(').next().unwrap_or_default() });
            Outcome { report, exit: e.exit_code(), message: Some(e.to_string()) }
        }
    };
    let mut report = json!({ "tool": "blc", "version": env!("CARGO_PKG_VERSION"), "command_line": echo });
    if let (Value::Object(head), Value::Object(body)) = (&mut report, std::mem::take(&mut outcome.report)) {
        head.extend(body);
    }
    report["exit_code"] = json!(outcome.exit);
    if cli.timing {
        report["timing_ms"] = json!(start.elapsed().as_secs_f64() * 1e3);
    }
    emit(&report, cli.pretty);
    if let Some(m) = &outcome.message {
        eprintln!("blc: {m}");
    }
    ExitCode::from(outcome.exit)
}
