//! `perturb`: command-line front end.
//!
//! ```text
//! perturb gen --ensemble goe --n 8 --seed 1
//! perturb assume --spectrum '{"family":"linear","n":3,"params":{"scale":1}}'
//! perturb solve --matrix A.json --noise E.json --p inf
//! perturb arrowhead --spectrum spec.json --seed 4
//! perturb exp --config cfg.json --threads 4 --out results/
//! ```
//!
//! Exit codes: 0 success, 1 usage or input error, 2 numeric failure.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use perturb_core::arrowhead::{
    lower_bound_check, solve_arrowhead, LowerBoundCheck, SecularSolution,
};
use perturb_core::bounds::{default_p_grid, AssumptionReport, DEFAULT_C0};
use perturb_core::ensembles::{
    realize_spectrum, sample_arrowhead_g, Ensemble, EnsembleSpec, Seed, SpectrumSpec,
};
use perturb_core::experiments::{run_experiment, write_outputs, ExperimentConfig, OutputFormat};
use perturb_core::matcore::io::{matrix_to_json, read_matrix, real_vector_from_json, AnyHermitian};
use perturb_core::matcore::{HermitianMatrix, Scalar, Spectrum};
use perturb_core::rs_solver::{RsSolver, SolveOptions};
use perturb_core::{exponent, PerturbError};

#[derive(Parser, Debug)]
#[command(
    name = "perturb",
    version,
    about = "Leading eigenpairs of randomly perturbed Hermitian matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a noise matrix, or write diag(λ) for a spectrum, as matrix JSON.
    Gen(GenArgs),
    /// Evaluate the gap assumption for a spectrum.
    Assume(AssumeArgs),
    /// Leading eigenpair of A + E by the fixed-point solver.
    Solve(SolveArgs),
    /// Secular-equation solution for diag(λ) plus arrowhead noise.
    Arrowhead(ArrowheadArgs),
    /// Run a Monte Carlo campaign from a config file.
    Exp(ExpArgs),
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Master seed [env: PERTURB_SEED; default 0].
    #[arg(long, env = "PERTURB_SEED", hide_env = true)]
    seed: Option<u64>,
    /// Dimension.
    #[arg(long)]
    n: Option<usize>,
    /// Exponent p in [1, inf]; "inf" is accepted.
    #[arg(long, value_parser = parse_exponent)]
    p: Option<f64>,
    /// Threshold on K_{n,p} for the assumption check.
    #[arg(long)]
    c0: Option<f64>,
    /// Relative stopping tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// json, or csv for experiment records.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file (directory for `exp`); stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Ensemble tag or `{"tag": ..., "params": {...}}` JSON.
    #[arg(long, conflicts_with = "spectrum")]
    ensemble: Option<String>,
    /// Spectrum JSON (inline or file); writes diag(λ).
    #[arg(long)]
    spectrum: Option<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct AssumeArgs {
    /// Spectrum JSON, inline or a file path.
    #[arg(long)]
    spectrum: String,
    /// ‖E‖₂ used for the Davis-Kahan column (default 2√n).
    #[arg(long)]
    e_norm: Option<f64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// Matrix JSON for A.
    #[arg(
        long,
        conflicts_with = "spectrum",
        required_unless_present = "spectrum"
    )]
    matrix: Option<PathBuf>,
    /// Spectrum JSON; A = diag(λ).
    #[arg(long)]
    spectrum: Option<String>,
    /// Matrix JSON for E.
    #[arg(long)]
    noise: PathBuf,
    /// Return the error instead of falling back to the dense oracle.
    #[arg(long)]
    no_fallback: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct ArrowheadArgs {
    /// Spectrum JSON, inline or a file path.
    #[arg(long)]
    spectrum: String,
    /// Vector JSON for g; sampled from --seed when absent.
    #[arg(long)]
    g: Option<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct ExpArgs {
    /// Experiment config JSON.
    #[arg(long)]
    config: PathBuf,
    /// Worker threads (default 1).
    #[arg(long)]
    threads: Option<usize>,
    #[command(flatten)]
    common: Common,
}

fn parse_exponent(s: &str) -> Result<f64, String> {
    match exponent::parse(s) {
        Some(p) if p >= 1.0 => Ok(p),
        _ => Err(format!("`{s}` is not an exponent in [1, inf]")),
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Core(PerturbError),
}

impl From<PerturbError> for CliError {
    fn from(e: PerturbError) -> Self {
        CliError::Core(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Core(e.into())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(e.into())
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Serialize)]
struct ErrorDoc<'a> {
    error: &'a str,
    message: String,
}

/// Inline JSON when the argument looks like an object, otherwise a path.
fn load_text(arg: &str) -> CliResult<String> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        Ok(arg.to_owned())
    } else {
        std::fs::read_to_string(arg)
            .map_err(|e| CliError::Usage(format!("cannot read `{arg}`: {e}")))
    }
}

fn load_spectrum(arg: &str, n: Option<usize>) -> CliResult<Spectrum> {
    let mut spec: SpectrumSpec = serde_json::from_str(&load_text(arg)?)?;
    if let Some(n) = n {
        spec = spec.with_n(n)?;
    }
    Ok(realize_spectrum(&spec)?)
}

fn require_json(common: &Common, what: &str) -> CliResult<()> {
    if common.format == Some(Format::Csv) {
        return Err(CliError::Usage(format!(
            "`{what}` writes JSON only; CSV is for experiment records"
        )));
    }
    Ok(())
}

fn emit(common: &Common, text: &str) -> CliResult<()> {
    match &common.out {
        Some(path) => std::fs::write(path, format!("{text}\n"))?,
        None => {
            let mut out = std::io::stdout().lock();
            match writeln!(out, "{text}") {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                r => r?,
            }
        }
    }
    Ok(())
}

fn emit_json<T: Serialize>(common: &Common, value: &T) -> CliResult<()> {
    emit(common, &serde_json::to_string_pretty(value)?)
}

fn cmd_gen(args: &GenArgs) -> CliResult<()> {
    let c = &args.common;
    require_json(c, "gen")?;
    if let Some(s) = &args.spectrum {
        let spectrum = load_spectrum(s, c.n)?;
        let a = HermitianMatrix::<f64>::from_real_diagonal(spectrum.values());
        return emit(c, &matrix_to_json(&a)?);
    }
    let n =
        c.n.ok_or_else(|| CliError::Usage("gen needs --n with --ensemble".into()))?;
    if n < 1 {
        return Err(CliError::Usage("--n must be positive".into()));
    }
    let tag = args.ensemble.as_deref().unwrap_or("goe");
    let spec: EnsembleSpec = if tag.trim_start().starts_with('{') {
        serde_json::from_str(tag)?
    } else {
        EnsembleSpec::new(tag)
    };
    let ensemble = Ensemble::from_spec(&spec)?;
    let m = ensemble.sample(n, Seed::new(c.seed(), 0));
    emit(c, &m.to_json()?)
}

fn cmd_assume(args: &AssumeArgs) -> CliResult<()> {
    let c = &args.common;
    require_json(c, "assume")?;
    let spectrum = load_spectrum(&args.spectrum, c.n)?;
    let c0 = c.c0.unwrap_or(DEFAULT_C0);
    let grid = match c.p {
        Some(p) => vec![p],
        None => default_p_grid(spectrum.n()),
    };
    let report = AssumptionReport::with_grid(&spectrum, c0, args.e_norm, &grid)?;
    emit_json(c, &report)
}

fn solve_with<T: Scalar>(
    a: Option<HermitianMatrix<T>>,
    spectrum: Option<Spectrum>,
    e: &HermitianMatrix<T>,
    opts: &SolveOptions,
    common: &Common,
) -> CliResult<()> {
    let solver = match (a, spectrum) {
        (Some(a), _) => RsSolver::new(a)?,
        (None, Some(s)) => RsSolver::from_spectrum(s),
        (None, None) => return Err(CliError::Usage("solve needs --matrix or --spectrum".into())),
    };
    if solver.n() != e.n() {
        return Err(PerturbError::DimensionMismatch {
            expected: solver.n(),
            found: e.n(),
        }
        .into());
    }
    let report = solver.solve(e, opts)?;
    emit_json(common, &report)
}

fn cmd_solve(args: &SolveArgs) -> CliResult<()> {
    let c = &args.common;
    require_json(c, "solve")?;
    let mut opts = SolveOptions::default();
    if let Some(p) = c.p {
        opts = opts.with_p(p);
    }
    if let Some(tol) = c.tol {
        opts = opts.with_tol(tol);
    }
    opts.fallback = !args.no_fallback;

    let noise = read_matrix(&args.noise)?;
    let a = args.matrix.as_deref().map(read_matrix).transpose()?;
    let spectrum = args
        .spectrum
        .as_deref()
        .map(|s| load_spectrum(s, c.n))
        .transpose()?;

    match (a, noise) {
        (None, AnyHermitian::Real(e)) => solve_with::<f64>(None, spectrum, &e, &opts, c),
        (None, AnyHermitian::Complex(e)) => solve_with::<Complex64>(None, spectrum, &e, &opts, c),
        (Some(AnyHermitian::Real(a)), AnyHermitian::Real(e)) => {
            solve_with(Some(a), None, &e, &opts, c)
        }
        (Some(a), e) => solve_with(Some(a.to_complex()), None, &e.to_complex(), &opts, c),
    }
}

#[derive(Serialize)]
struct ArrowheadDoc {
    g: Vec<f64>,
    solution: SecularSolution,
    lower_bound: LowerBoundCheck,
}

fn cmd_arrowhead(args: &ArrowheadArgs) -> CliResult<()> {
    let c = &args.common;
    require_json(c, "arrowhead")?;
    let spectrum = load_spectrum(&args.spectrum, c.n)?;
    let g = match &args.g {
        Some(g) => real_vector_from_json(&load_text(g)?)?,
        None => sample_arrowhead_g(spectrum.n(), Seed::new(c.seed(), 0))?,
    };
    let solution = solve_arrowhead(&spectrum, &g)?;
    let lower_bound = lower_bound_check(&solution, &spectrum, &g)?;
    emit_json(
        c,
        &ArrowheadDoc {
            g,
            solution,
            lower_bound,
        },
    )
}

fn cmd_exp(args: &ExpArgs) -> CliResult<()> {
    let c = &args.common;
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", args.config.display())))?;
    let mut cfg = ExperimentConfig::from_json(&text)?;
    if let Some(seed) = c.seed {
        cfg.seed = seed;
    }
    if let Some(n) = c.n {
        cfg.n_list = Some(vec![n]);
    }
    if let Some(p) = c.p {
        cfg.p = p;
    }
    if let Some(tol) = c.tol {
        cfg.tol = tol;
    }
    let out = run_experiment(&cfg, Some(args.threads.unwrap_or(1)))?;

    let dir = c
        .out
        .clone()
        .or_else(|| cfg.output.as_ref().map(|o| resolve(&args.config, &o.path)));
    let format = match (c.format, &cfg.output) {
        (Some(Format::Csv), _) => OutputFormat::Csv,
        (Some(Format::Json), _) => OutputFormat::Json,
        (None, Some(o)) => o.format,
        (None, None) => OutputFormat::Csv,
    };
    match dir {
        Some(dir) => {
            let (records, summary) = write_outputs(&cfg, &out, &dir, format)?;
            eprintln!("wrote {} and {}", records.display(), summary.display());
            Ok(())
        }
        None => emit_json(c, &out.summary),
    }
}

/// Output paths in a config are relative to the config file.
fn resolve(config: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        return path.to_owned();
    }
    config.parent().unwrap_or(Path::new(".")).join(path)
}

fn run(cli: Cli) -> CliResult<()> {
    match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Assume(a) => cmd_assume(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Arrowhead(a) => cmd_arrowhead(a),
        Command::Exp(a) => cmd_exp(a),
    }
}

fn error_kind(e: &PerturbError) -> &'static str {
    match e {
        PerturbError::Domain(_) => "domain",
        PerturbError::UnsupportedExponent(_) => "unsupported_exponent",
        PerturbError::NumericFailure { .. } => "numeric_failure",
        PerturbError::InvalidSpectrum(_) => "invalid_spectrum",
        PerturbError::InvalidMatrix(_) => "invalid_matrix",
        PerturbError::DimensionMismatch { .. } => "dimension_mismatch",
        PerturbError::GapCollapse { .. } => "gap_collapse",
        PerturbError::ContractionFailure { .. } => "contraction_failure",
        PerturbError::NonConvergence { .. } => "non_convergence",
        PerturbError::Inconsistency(_) => "inconsistency",
        PerturbError::Config(_) => "config",
        PerturbError::Io(_) => "io",
        PerturbError::Json(_) => "json",
        PerturbError::Csv(_) => "csv",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("run `perturb <command> --help` for the expected inputs");
            ExitCode::from(1)
        }
        Err(CliError::Core(e)) => {
            let doc = ErrorDoc {
                error: error_kind(&e),
                message: e.to_string(),
            };
            eprintln!(
                "{}",
                serde_json::to_string(&doc).unwrap_or_else(|_| e.to_string())
            );
            ExitCode::from(if e.is_numeric() { 2 } else { 1 })
        }
    }
}
