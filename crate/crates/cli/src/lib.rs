//! Pipelines behind the `vexfrac` binary.
//!
//! Every pipeline loads a problem file, builds the grid, runs one stage of
//! the analysis, and writes JSON reports and CSV tables into an output
//! directory together with a `manifest.json` that records all inputs and
//! the SHA-256 of every artifact.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use vexfrac::analysis::{
    bootstrap_linf, norm_modular_suite, power_comparison_suite, simon_suite, truncation_suite, BootstrapConfig, BootstrapReport,
    InequalityReport,
};
use vexfrac::nonlocal::EnergyFunctional;
use vexfrac::problem::file::{load_problem_file, parse_problem, LoadedProblem, REFERENCE_TOML};
use vexfrac::problem::validate_hypotheses;
use vexfrac::solvers::{
    distinct, find_local_min, lambda_sweep, mountain_pass, solve_eigenproblem, solve_nonnegative, weak_form_recheck, Solution,
    SolverConfig, WeakFormCheck,
};
use vexfrac::{build_domain, DiscreteDomain, GridFunction, ProblemSpec};

/// Samples per pointwise inequality suite in `verify`.
pub const VERIFY_SAMPLES: usize = 10_000;
/// Random functions in the norm-modular suite of `verify`.
pub const VERIFY_FUNCTIONS: usize = 100;
/// Hypothesis-validation sample count.
pub const VALIDATION_SAMPLES: usize = 512;
/// Random directions of the weak-form re-check.
pub const WEAK_FORM_DIRECTIONS: usize = 20;
pub const DEFAULT_LAMBDA_GRID: [f64; 5] = [0.01, 0.05, 0.1, 0.5, 1.0];

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] vexfrac::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Usage(String),
    #[error("no solution input: pass --solution PATH pointing at a solution_*.json artifact")]
    NoSolution,
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => match e {
                vexfrac::Error::Config(_) => "config",
                vexfrac::Error::Parse { .. } => "parse",
                vexfrac::Error::Evaluator { .. } => "evaluator",
                vexfrac::Error::DeclaredBound { .. } => "declared-bound",
                vexfrac::Error::Domain(_) => "domain",
                vexfrac::Error::PairWeight { .. } => "pair-weight",
                vexfrac::Error::Numeric { .. } => "numeric",
                vexfrac::Error::Geometry(_) => "geometry",
                vexfrac::Error::Solver(_) => "solver",
            },
            CliError::Io { .. } => "io",
            CliError::Json(_) => "json",
            CliError::Usage(_) => "usage",
            CliError::NoSolution => "no-solution",
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.display().to_string(), source }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Validate,
    Solve,
    Sweep,
    Eigen,
    Verify,
    Bootstrap,
    Paper,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Solve => "solve",
            Command::Sweep => "sweep",
            Command::Eigen => "eigen",
            Command::Verify => "verify",
            Command::Bootstrap => "bootstrap",
            Command::Paper => "paper",
        }
    }
}

/// Everything a run depends on.
#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Problem file; the built-in reference problem when absent.
    pub spec: Option<PathBuf>,
    pub cells: usize,
    pub collar_factor: f64,
    /// Overrides the problem file's `lambda`.
    pub lambda: Option<f64>,
    pub lambda_grid: Option<Vec<f64>>,
    pub seed: u64,
    pub out: PathBuf,
    pub tol: f64,
    /// Solution artifact consumed by `bootstrap`.
    pub solution: Option<PathBuf>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            spec: None,
            cells: 32,
            collar_factor: 2.0,
            lambda: None,
            lambda_grid: None,
            seed: 0,
            out: PathBuf::from("out"),
            tol: 1e-10,
            solution: None,
        }
    }
}

impl RunOptions {
    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig { grad_tol: self.tol, seed: self.seed, ..SolverConfig::default() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: Command,
    pub spec_path: Option<String>,
    pub spec_sha256: String,
    pub cells: usize,
    pub collar_factor: f64,
    pub lambda: Option<f64>,
    pub lambda_grid: Option<Vec<f64>>,
    pub tol: f64,
    pub seed: u64,
    pub solver: SolverConfig,
    pub solution_input: Option<String>,
    pub output_dir: String,
    pub warnings: Vec<String>,
    /// Artifact file name → SHA-256 of its contents.
    pub artifacts: BTreeMap<String, String>,
    pub passed: bool,
    pub version: String,
}

/// What a finished run reports back to the binary.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub passed: bool,
    pub summary: Vec<String>,
    pub manifest: RunManifest,
}

/// Reads a problem file (or the built-in reference problem).
pub fn load_problem(path: Option<&Path>) -> CliResult<(LoadedProblem, String)> {
    match path {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(io_err(p))?;
            Ok((load_problem_file(p)?, text))
        }
        None => Ok((parse_problem(REFERENCE_TOML)?, REFERENCE_TOML.to_string())),
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut s = String::with_capacity(64);
    for b in digest.iter() {
        let _ = write!(s, "{b:02x}");
    }
    s
}

/// Collects artifacts and writes each through a temporary file and a rename.
struct Artifacts {
    dir: PathBuf,
    sums: BTreeMap<String, String>,
}

impl Artifacts {
    fn new(dir: &Path) -> CliResult<Self> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        Ok(Artifacts { dir: dir.to_path_buf(), sums: BTreeMap::new() })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> CliResult<()> {
        write_atomic(&self.dir.join(name), bytes)?;
        self.sums.insert(name.to_string(), sha256_hex(bytes));
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    fs::write(&tmp, bytes).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

/// Full-precision CSV number.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn coordinate_header(dim: usize) -> Vec<String> {
    (1..=dim).map(|k| format!("x{k}")).collect()
}

/// Node coordinates followed by one column per named grid function.
fn grid_csv(d: &DiscreteDomain, columns: &[(&str, &GridFunction)]) -> String {
    let dim = d.dim();
    let mut header = coordinate_header(dim);
    header.extend(columns.iter().map(|(n, _)| n.to_string()));
    let mut out = header.join(",");
    out.push('\n');
    for (i, x) in d.interior.iter().enumerate() {
        let mut row: Vec<String> = x[..dim].iter().map(|&c| num(c)).collect();
        row.extend(columns.iter().map(|(_, u)| num(u.values()[i])));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// A solution as stored on disk.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionFile {
    pub lambda: f64,
    pub cells: usize,
    pub collar_factor: f64,
    pub solution: Solution,
    pub weak_form: WeakFormCheck,
}

#[derive(Debug, Clone, Serialize)]
struct VerifyReport {
    suites: Vec<InequalityReport>,
    samples: usize,
    violations: usize,
}

struct Context {
    loaded: LoadedProblem,
    spec_text: String,
    domain: DiscreteDomain,
    config: SolverConfig,
}

impl Context {
    fn spec(&self) -> &ProblemSpec {
        &self.loaded.spec
    }

    fn lambda(&self, opts: &RunOptions) -> f64 {
        opts.lambda.unwrap_or(self.loaded.spec.lambda)
    }
}

fn prepare(opts: &RunOptions) -> CliResult<Context> {
    if !(opts.tol > 0.0) {
        return Err(CliError::Usage(format!("--tol must be positive, got {}", opts.tol)));
    }
    let (loaded, spec_text) = load_problem(opts.spec.as_deref())?;
    let domain = build_domain(&loaded.spec, opts.cells, opts.collar_factor)?;
    let config = opts.solver_config();
    config.validate()?;
    Ok(Context { loaded, spec_text, domain, config })
}

/// Runs one pipeline and writes its artifacts plus `manifest.json`.
pub fn run(command: Command, opts: &RunOptions) -> CliResult<RunOutcome> {
    let ctx = prepare(opts)?;
    let mut art = Artifacts::new(&opts.out)?;
    let mut summary = Vec::new();
    let passed = match command {
        Command::Validate => stage_validate(&ctx, &mut art, &mut summary)?,
        Command::Solve => stage_solve(&ctx, opts, &mut art, &mut summary)?.0,
        Command::Sweep => stage_sweep(&ctx, opts, &mut art, &mut summary)?.0,
        Command::Eigen => stage_eigen(&ctx, &mut art, &mut summary)?,
        Command::Verify => stage_verify(&ctx, opts, &mut art, &mut summary)?,
        Command::Bootstrap => {
            let path = opts.solution.as_deref().ok_or(CliError::NoSolution)?;
            let text = fs::read_to_string(path).map_err(io_err(path))?;
            let file: SolutionFile = serde_json::from_str(&text)?;
            if file.solution.u.len() != ctx.domain.len() {
                return Err(CliError::Usage(format!(
                    "solution has {} nodes but the grid has {}; pass the --cells used to compute it",
                    file.solution.u.len(),
                    ctx.domain.len()
                )));
            }
            stage_bootstrap(&ctx, &file.solution.u, &mut art, &mut summary)?
        }
        Command::Paper => {
            let valid = stage_validate(&ctx, &mut art, &mut summary)?;
            let (swept, best) = stage_sweep(&ctx, opts, &mut art, &mut summary)?;
            let boot = match best {
                Some(u) => stage_bootstrap(&ctx, &u, &mut art, &mut summary)?,
                None => {
                    summary.push("bootstrap: skipped, no λ with two solutions".into());
                    false
                }
            };
            valid && swept && boot
        }
    };
    let manifest = RunManifest {
        command,
        spec_path: opts.spec.as_ref().map(|p| p.display().to_string()),
        spec_sha256: sha256_hex(ctx.spec_text.as_bytes()),
        cells: opts.cells,
        collar_factor: opts.collar_factor,
        lambda: opts.lambda,
        lambda_grid: opts.lambda_grid.clone(),
        tol: opts.tol,
        seed: opts.seed,
        solver: ctx.config.clone(),
        solution_input: opts.solution.as_ref().map(|p| p.display().to_string()),
        output_dir: opts.out.display().to_string(),
        warnings: ctx.loaded.warnings.clone(),
        artifacts: art.sums.clone(),
        passed,
        version: env!("CARGO_PKG_VERSION").to_string(),
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    write_atomic(&opts.out.join("manifest.json"), text.as_bytes())?;
    Ok(RunOutcome { passed, summary, manifest })
}

/// Structured error report written next to the artifacts.
pub fn write_error(out: &Path, command: Command, err: &CliError) -> CliResult<()> {
    fs::create_dir_all(out).map_err(io_err(out))?;
    let v = serde_json::json!({ "command": command.name(), "kind": err.kind(), "message": err.to_string() });
    let mut text = serde_json::to_string_pretty(&v)?;
    text.push('\n');
    write_atomic(&out.join("error.json"), text.as_bytes())
}

fn stage_validate(ctx: &Context, art: &mut Artifacts, summary: &mut Vec<String>) -> CliResult<bool> {
    let report = validate_hypotheses(ctx.spec(), VALIDATION_SAMPLES)?;
    let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    summary.push(format!(
        "validate: admissible={} multiplicity={} regularity={} failing={:?}",
        report.admissible, report.multiplicity_eligible, report.regularity_eligible, failed
    ));
    let v = serde_json::json!({ "report": report, "domain": ctx.domain.summary(), "warnings": ctx.loaded.warnings });
    art.json("validation.json", &v)?;
    Ok(report.admissible)
}

fn solution_file(ctx: &Context, lambda: f64, opts: &RunOptions, s: &Solution) -> SolutionFile {
    let f = if ctx.spec().nonlinearity.is_positive_part() {
        EnergyFunctional::positive_part(&ctx.domain, lambda)
    } else {
        EnergyFunctional::new(&ctx.domain, lambda)
    };
    let weak_form = weak_form_recheck(&f, &s.u, WEAK_FORM_DIRECTIONS, ctx.config.seed, ctx.config.grad_tol);
    SolutionFile { lambda, cells: opts.cells, collar_factor: opts.collar_factor, solution: s.clone(), weak_form }
}

fn write_pair(ctx: &Context, opts: &RunOptions, lambda: f64, mp: &Solution, lm: &Solution, art: &mut Artifacts) -> CliResult<bool> {
    let fmp = solution_file(ctx, lambda, opts, mp);
    let flm = solution_file(ctx, lambda, opts, lm);
    art.json("solution_mp.json", &fmp)?;
    art.json("solution_min.json", &flm)?;
    art.write("solution.csv", grid_csv(&ctx.domain, &[("u_mp", &mp.u), ("u_min", &lm.u)]).as_bytes())?;
    let mut csv = String::from("kind,lambda,energy,grad_norm,linf_norm,min_value,converged,iterations,weak_form_ok\n");
    for (name, s, f) in [("mountain_pass", mp, &fmp), ("local_min", lm, &flm)] {
        let _ = writeln!(
            csv,
            "{name},{},{},{},{},{},{},{},{}",
            num(lambda),
            num(s.energy),
            num(s.grad_norm),
            num(s.linf_norm),
            num(s.u.min()),
            s.converged,
            s.iterations,
            f.weak_form.passed
        );
    }
    art.write("energies.csv", csv.as_bytes())?;
    Ok(fmp.weak_form.passed && flm.weak_form.passed)
}

fn stage_solve(
    ctx: &Context,
    opts: &RunOptions,
    art: &mut Artifacts,
    summary: &mut Vec<String>,
) -> CliResult<(bool, Option<GridFunction>)> {
    let lambda = ctx.lambda(opts);
    let (mp, lm) = if ctx.spec().nonlinearity.is_positive_part() {
        solve_nonnegative(ctx.spec(), &ctx.domain, lambda, &ctx.config)?
    } else {
        (mountain_pass(ctx.spec(), &ctx.domain, lambda, &ctx.config)?, find_local_min(ctx.spec(), &ctx.domain, lambda, &ctx.config)?)
    };
    let weak = write_pair(ctx, opts, lambda, &mp, &lm, art)?;
    let two = distinct(&mp, &lm);
    summary.push(format!(
        "solve: λ={lambda} J(u₁)={:.6e} J(u₂)={:.6e} |∇J|=({:.2e}, {:.2e}) distinct={two} weak-form={weak}",
        mp.energy, lm.energy, mp.grad_norm, lm.grad_norm
    ));
    Ok((two && weak, Some(mp.u)))
}

fn stage_sweep(
    ctx: &Context,
    opts: &RunOptions,
    art: &mut Artifacts,
    summary: &mut Vec<String>,
) -> CliResult<(bool, Option<GridFunction>)> {
    let grid = opts.lambda_grid.clone().unwrap_or_else(|| DEFAULT_LAMBDA_GRID.to_vec());
    let report = lambda_sweep(ctx.spec(), &ctx.domain, &grid, &ctx.config)?;
    art.json("sweep.json", &report)?;
    let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
    let mut csv = String::from("lambda,local_min_found,local_min_energy,mountain_pass_found,mountain_pass_energy,separation,distinct\n");
    for r in &report.rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            num(r.lambda),
            r.local_min_found,
            opt(r.local_min_energy),
            r.mountain_pass_found,
            opt(r.mountain_pass_energy),
            opt(r.separation),
            r.distinct
        );
    }
    art.write("sweep.csv", csv.as_bytes())?;
    summary.push(format!("sweep: {} rows, lambda_star={:?}", report.rows.len(), report.lambda_star));
    let Some(best) = report.best() else { return Ok((false, None)) };
    let (Some(mp), Some(lm)) = (&best.mountain_pass, &best.local_min) else { return Ok((false, None)) };
    let weak = write_pair(ctx, opts, best.lambda, mp, lm, art)?;
    Ok((weak, Some(mp.u.clone())))
}

fn stage_eigen(ctx: &Context, art: &mut Artifacts, summary: &mut Vec<String>) -> CliResult<bool> {
    let e = solve_eigenproblem(ctx.spec(), &ctx.domain, &ctx.config)?;
    art.json("eigen.json", &e)?;
    art.write("eigenfunction.csv", grid_csv(&ctx.domain, &[("u", &e.solution.u)]).as_bytes())?;
    summary.push(format!("eigen: λ={:.12e} residual={:.2e} converged={}", e.lambda_estimate, e.residual, e.solution.converged));
    Ok(e.solution.converged)
}

fn stage_verify(ctx: &Context, opts: &RunOptions, art: &mut Artifacts, summary: &mut Vec<String>) -> CliResult<bool> {
    let s = opts.seed;
    let suites = vec![
        simon_suite(VERIFY_SAMPLES, s.wrapping_add(1)),
        truncation_suite(VERIFY_SAMPLES, s.wrapping_add(2)),
        power_comparison_suite(VERIFY_SAMPLES, s.wrapping_add(3)),
        norm_modular_suite(ctx.spec(), &ctx.domain, VERIFY_FUNCTIONS, s.wrapping_add(4))?,
    ];
    let samples = suites.iter().map(|r| r.samples).sum();
    let violations = suites.iter().map(|r| r.violations).sum();
    for r in &suites {
        summary.push(format!("verify: {} samples={} violations={} worst={:.3e}", r.name, r.samples, r.violations, r.worst_margin));
    }
    art.json("inequality_report.json", &VerifyReport { suites, samples, violations })?;
    Ok(violations == 0)
}

fn bootstrap_csv(r: &BootstrapReport) -> String {
    let mut csv = String::from("exponent,norm\n");
    let _ = writeln!(csv, "{},{}", num(r.theta_minus), num(r.base_norm));
    for (q, n) in r.exponents.iter().zip(&r.norms) {
        let _ = writeln!(csv, "{},{}", num(*q), num(*n));
    }
    csv
}

fn stage_bootstrap(ctx: &Context, u: &GridFunction, art: &mut Artifacts, summary: &mut Vec<String>) -> CliResult<bool> {
    let cfg = BootstrapConfig::default_for(ctx.spec(), &ctx.domain);
    let r = bootstrap_linf(u, ctx.spec(), &ctx.domain, &cfg)?;
    art.json("bootstrap.json", &r)?;
    art.write("bootstrap.csv", bootstrap_csv(&r).as_bytes())?;
    summary.push(format!(
        "bootstrap: {} rungs, max|u|={:.6e}, last norm={:.6e}, chain_ok={} trivial={} monotone={}",
        r.norms.len(),
        r.linf,
        r.norms.last().copied().unwrap_or(0.0),
        r.bound_chain_ok,
        r.chain_trivial,
        r.monotone
    ));
    Ok(r.bound_chain_ok && r.monotone)
}
