//! Command-line front end: model files in, reports out.

mod commands;
mod model;
mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub use model::{parse_model, ModelFile, ModelKind, SCHEMA_VERSION};
pub use report::{exit_code, Entry, Field, NamedMatrix, Num, Report, Settings, Value};

use crate::ni::FrequencyGrid;
use crate::numlin::Tolerances;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn verdict(&self) -> &'static str {
        match self {
            CliError::Malformed(_) => "malformed-input",
            CliError::Dimension(_) => "dimension-mismatch",
            CliError::Numerical(_) => "numerical-failure",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "riccati", version, about = "Riccati-equation tools for NI systems and coherent quantum control")]
pub struct Cli {
    /// Predicate tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Frequency grid as `lo,hi,count`.
    #[arg(long, global = true, default_value = "0.001,1000,2000")]
    pub grid: String,
    /// Seed for multistart searches.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Negative-imaginary analysis and synthesis.
    Ni {
        #[command(subcommand)]
        cmd: NiCommand,
    },
    /// Algebraic Riccati equations.
    Care {
        #[command(subcommand)]
        cmd: CareCommand,
    },
    /// Linear quantum systems.
    Quantum {
        #[command(subcommand)]
        cmd: QuantumCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum NiCommand {
    /// Classify a real state-space model.
    Check { model: PathBuf },
    /// DC-gain stability test for the positive-feedback loop of M and N.
    Stability { m: PathBuf, n: PathBuf },
    /// State-feedback synthesis making the closed loop NI.
    Synth { plant: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum CareCommand {
    /// Stabilizing solution of `A^H X + X A - X B R^-1 B^H X + Q = 0`.
    Solve { model: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum QuantumCommand {
    /// Doubled-up QSDE matrices and the quadrature form.
    Build { spec: PathBuf },
    /// Coherent H-infinity controller and closed-loop verification.
    Hinf {
        plant: PathBuf,
        /// Closed-loop bound.
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        /// Also run the realizability test on the controller.
        #[arg(long)]
        realize: bool,
    },
    /// Skew-symmetric Riccati realizability test.
    Physreal { model: PathBuf },
}

/// Settings shared by every command.
#[derive(Debug, Clone)]
pub struct Context {
    pub tol: Tolerances,
    pub grid: FrequencyGrid,
    pub seed: u64,
}

fn parse_grid(s: &str) -> Result<(f64, f64, usize), CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || CliError::Malformed(format!("--grid expects lo,hi,count, got {s:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo = parts[0].parse::<f64>().map_err(|_| bad())?;
    let hi = parts[1].parse::<f64>().map_err(|_| bad())?;
    let count = parts[2].parse::<usize>().map_err(|_| bad())?;
    Ok((lo, hi, count))
}

fn echo(cmd: &Command) -> Vec<String> {
    let p = |p: &PathBuf| p.display().to_string();
    match cmd {
        Command::Ni { cmd: NiCommand::Check { model } } => vec!["ni".into(), "check".into(), p(model)],
        Command::Ni { cmd: NiCommand::Stability { m, n } } => vec!["ni".into(), "stability".into(), p(m), p(n)],
        Command::Ni { cmd: NiCommand::Synth { plant } } => vec!["ni".into(), "synth".into(), p(plant)],
        Command::Care { cmd: CareCommand::Solve { model } } => vec!["care".into(), "solve".into(), p(model)],
        Command::Quantum { cmd: QuantumCommand::Build { spec } } => vec!["quantum".into(), "build".into(), p(spec)],
        Command::Quantum { cmd: QuantumCommand::Hinf { plant, gamma, realize } } => {
            let mut v = vec!["quantum".into(), "hinf".into(), p(plant), format!("--gamma={gamma:e}")];
            if *realize {
                v.push("--realize".into());
            }
            v
        }
        Command::Quantum { cmd: QuantumCommand::Physreal { model } } => {
            vec!["quantum".into(), "physreal".into(), p(model)]
        }
    }
}

/// Runs a parsed command and returns its report.
pub fn execute(cli: &Cli) -> Report {
    let (lo, hi, count) = parse_grid(&cli.grid).unwrap_or((f64::NAN, f64::NAN, 0));
    let settings = Settings {
        tol: Num(cli.tol),
        grid_lo: Num(lo),
        grid_hi: Num(hi),
        grid_count: count,
        seed: cli.seed,
        format: match cli.format {
            Format::Json => "json".into(),
            Format::Text => "text".into(),
        },
    };
    let body = context(cli).and_then(|ctx| commands::dispatch(&cli.command, &ctx));
    let mut report = Report {
        tool: format!("riccati {}", env!("CARGO_PKG_VERSION")),
        command: echo(&cli.command),
        settings,
        verdict: String::new(),
        exit_code: 0,
        fields: vec![],
        tolerances: vec![],
        matrices: vec![],
        warnings: vec![],
        error: None,
    };
    match body {
        Ok(b) => {
            report.verdict = b.verdict;
            report.fields = b.fields;
            report.tolerances = b.tolerances;
            report.matrices = b.matrices;
            report.warnings = b.warnings;
        }
        Err(e) => {
            report.verdict = e.verdict().into();
            report.error = Some(e.to_string());
        }
    }
    report.exit_code = exit_code(&report.verdict);
    report
}

fn context(cli: &Cli) -> Result<Context, CliError> {
    if !(cli.tol.is_finite() && cli.tol > 0.0) {
        return Err(CliError::Malformed(format!("--tol must be positive, got {}", cli.tol)));
    }
    let (lo, hi, count) = parse_grid(&cli.grid)?;
    let grid = FrequencyGrid::log(lo, hi, count).map_err(|e| CliError::Malformed(format!("--grid: {e}")))?;
    Ok(Context { tol: Tolerances { predicate: cli.tol, ..Tolerances::default() }, grid, seed: cli.seed })
}

pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    }
}

/// Entry point for the binary: parses `args`, runs the command, writes the
/// report and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let report = execute(&cli);
    let text = render(&report, cli.format);
    if let Some(e) = &report.error {
        eprintln!("riccati: {e}");
    }
    match &cli.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("riccati: cannot write {}: {e}", path.display());
                return 70;
            }
        }
        None => print!("{text}"),
    }
    report.exit_code
}
