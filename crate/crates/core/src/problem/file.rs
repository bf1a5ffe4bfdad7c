//! The problem file format (TOML).
//!
//! ```toml
//! dimension = 1
//! omega = [[0.0, 1.0]]          # one [lo, hi] per axis
//! lambda = 0.05
//! s = "0.4"                     # formulas over x1..xn, y1..yn (see `expr`)
//! p = "2"
//! alpha = "1.5"                 # formulas over x1..xn only
//! r = "3.5"
//!
//! [bounds]                      # optional declared ranges; sampled when absent
//! s = [0.4, 0.4]
//!
//! [nonlinearity]
//! growth_bound = 1.0            # M
//! ar_a = 1.0                    # a
//! ar_b = 3.5                    # b
//! t_star = 1.0                  # t*
//!
//! [[nonlinearity.terms]]
//! coefficient = "1"
//! exponent = "3.5"
//! mode = "odd-power"            # or "positive-part"
//! ```
//!
//! Pair formulas are always symmetrized as `(g(x,y) + g(y,x)) / 2`; a
//! warning is recorded when the source formula was not already symmetric.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::expr::Expr;
use super::field::{PairField, PointField};
use super::hypotheses::halton;
use super::nonlinearity::{Nonlinearity, PowerTerm, SignMode};
use super::spec::{BoxRegion, ProblemSpec};
use crate::{Error, Point, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub dimension: usize,
    pub omega: Vec<[f64; 2]>,
    pub lambda: f64,
    pub s: String,
    pub p: String,
    pub alpha: String,
    pub r: String,
    #[serde(default)]
    pub bounds: DeclaredBounds,
    pub nonlinearity: NonlinearityFile,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeclaredBounds {
    pub s: Option<[f64; 2]>,
    pub p: Option<[f64; 2]>,
    pub alpha: Option<[f64; 2]>,
    pub r: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonlinearityFile {
    pub growth_bound: f64,
    pub ar_a: f64,
    pub ar_b: f64,
    pub t_star: f64,
    #[serde(default)]
    pub terms: Vec<TermFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermFile {
    pub coefficient: String,
    pub exponent: String,
    #[serde(default = "default_mode")]
    pub mode: SignMode,
}

fn default_mode() -> SignMode {
    SignMode::OddPower
}

/// A parsed problem plus any warnings raised while building it.
#[derive(Debug, Clone)]
pub struct LoadedProblem {
    pub spec: ProblemSpec,
    pub file: ProblemFile,
    pub warnings: Vec<String>,
}

const RANGE_SAMPLES: usize = 4096;

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

/// Locates a formula error inside the file text.
fn relocate(text: &str, key: &str, formula: &str, err: Error) -> Error {
    let Error::Parse { column, message, .. } = err else {
        return err;
    };
    let quoted = format!("\"{formula}\"");
    let found = text.lines().enumerate().find_map(|(i, l)| {
        let t = l.trim_start();
        if t.starts_with(key) && t[key.len()..].trim_start().starts_with('=') {
            l.find(&quoted).map(|c| (i + 1, c + 1 + column))
        } else {
            None
        }
    });
    let (line, column) = found.unwrap_or((0, column));
    Error::Parse { line, column, message: format!("in `{key}`: {message}") }
}

pub fn parse_problem(text: &str) -> Result<LoadedProblem> {
    let file: ProblemFile = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((0, 0), |s| line_col(text, s.start));
        Error::Parse { line, column, message: e.message().to_string() }
    })?;
    build_problem(file, text)
}

pub fn load_problem_file(path: &Path) -> Result<LoadedProblem> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_problem(&text)
}

fn compile(text: &str, key: &str, formula: &str, dim: usize, allow_y: bool) -> Result<Expr> {
    let e = Expr::parse(formula).map_err(|err| relocate(text, key, formula, err))?;
    if e.max_coordinate() > dim {
        return Err(Error::Config(format!("`{key}` references coordinate {} in dimension {dim}", e.max_coordinate())));
    }
    if !allow_y && e.uses_y() {
        return Err(Error::Config(format!("`{key}` is a function of x only and may not use y coordinates")));
    }
    Ok(e)
}

fn unit_pairs(omega: &BoxRegion, count: usize) -> Vec<(Point, Point)> {
    let dim = omega.dim;
    let mut out: Vec<(Point, Point)> = Vec::new();
    for a in omega.corners() {
        for b in omega.corners() {
            out.push((a, b));
        }
    }
    for h in halton(count, 2 * dim) {
        let (u, v) = if dim == 1 { ([h[0], 0.0], [h[1], 0.0]) } else { ([h[0], h[1]], [h[2], h[3]]) };
        out.push((omega.from_unit(&u), omega.from_unit(&v)));
    }
    out
}

fn pair_field(key: &str, e: Expr, declared: Option<[f64; 2]>, omega: &BoxRegion, warnings: &mut Vec<String>) -> Result<PairField> {
    if let Some(c) = e.as_constant() {
        let mut f = PairField::constant(key, c);
        if let Some([lo, hi]) = declared {
            f = PairField::symmetrized(key, move |_, _| c, lo, hi);
        }
        return Ok(f);
    }
    let samples = unit_pairs(omega, RANGE_SAMPLES);
    let mut asym: f64 = 0.0;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (x, y) in &samples {
        let (a, b) = (e.eval(x, y), e.eval(y, x));
        asym = asym.max((a - b).abs());
        let v = 0.5 * (a + b);
        if !v.is_finite() {
            return Err(Error::evaluator(key, v, &[*x, *y]));
        }
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if asym > 1e-12 {
        warnings
            .push(format!("`{key}` = \"{}\" is not symmetric (max |g(x,y) - g(y,x)| = {asym:.3e}); using (g(x,y) + g(y,x))/2", e.source()));
    }
    let [lo, hi] = declared.unwrap_or([lo, hi]);
    Ok(PairField::symmetrized(key, move |x, y| e.eval(x, y), lo, hi))
}

fn point_field(key: &str, e: Expr, declared: Option<[f64; 2]>, omega: &BoxRegion) -> Result<PointField> {
    if let Some(c) = e.as_constant() {
        let f = PointField::constant(key, c);
        return Ok(match declared {
            Some([lo, hi]) => f.with_bounds(lo, hi),
            None => f,
        });
    }
    let mut pts = omega.corners();
    pts.extend(halton(RANGE_SAMPLES, omega.dim).iter().map(|h| omega.from_unit(&[h[0], h[1]])));
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for x in &pts {
        let v = e.eval(x, &[0.0; 2]);
        if !v.is_finite() {
            return Err(Error::evaluator(key, v, &[*x]));
        }
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let [lo, hi] = declared.unwrap_or([lo, hi]);
    Ok(PointField::from_fn(key, move |x| e.eval(x, &[0.0; 2]), lo, hi))
}

fn build_problem(file: ProblemFile, text: &str) -> Result<LoadedProblem> {
    let dim = file.dimension;
    if !(1..=2).contains(&dim) {
        return Err(Error::Config(format!("`dimension` must be 1 or 2, got {dim}")));
    }
    if file.omega.len() != dim {
        return Err(Error::Config(format!("`omega` needs {dim} [lo, hi] pairs, got {}", file.omega.len())));
    }
    if !(file.lambda >= 0.0 && file.lambda.is_finite()) {
        return Err(Error::Config(format!("`lambda` must be a finite nonnegative number, got {}", file.lambda)));
    }
    let lo: Vec<f64> = file.omega.iter().map(|a| a[0]).collect();
    let hi: Vec<f64> = file.omega.iter().map(|a| a[1]).collect();
    let omega = BoxRegion::new(&lo, &hi)?;

    let mut warnings = Vec::new();
    let s = pair_field("s", compile(text, "s", &file.s, dim, true)?, file.bounds.s, &omega, &mut warnings)?;
    let p = pair_field("p", compile(text, "p", &file.p, dim, true)?, file.bounds.p, &omega, &mut warnings)?;
    let alpha = point_field("alpha", compile(text, "alpha", &file.alpha, dim, false)?, file.bounds.alpha, &omega)?;
    let r = point_field("r", compile(text, "r", &file.r, dim, false)?, file.bounds.r, &omega)?;

    let nl = &file.nonlinearity;
    let mut terms = Vec::new();
    for (i, t) in nl.terms.iter().enumerate() {
        let c = compile(text, "coefficient", &t.coefficient, dim, false)?;
        let rho = compile(text, "exponent", &t.exponent, dim, false)?;
        terms.push(PowerTerm {
            coefficient: point_field(&format!("c{i}"), c, None, &omega)?,
            exponent: point_field(&format!("rho{i}"), rho, None, &omega)?,
            mode: t.mode,
        });
    }
    let modes: Vec<SignMode> = terms.iter().map(|t| t.mode).collect();
    if modes.windows(2).any(|w| w[0] != w[1]) {
        warnings.push("nonlinearity mixes odd-power and positive-part terms".into());
    }
    for (name, v) in [("growth_bound", nl.growth_bound), ("ar_a", nl.ar_a), ("t_star", nl.t_star)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Config(format!("`nonlinearity.{name}` must be positive, got {v}")));
        }
    }
    let spec = ProblemSpec {
        omega,
        s,
        p,
        alpha,
        r,
        nonlinearity: Nonlinearity { terms, growth_bound: nl.growth_bound, ar_a: nl.ar_a, ar_b: nl.ar_b, t_star: nl.t_star },
        lambda: file.lambda,
    };
    Ok(LoadedProblem { spec, file, warnings })
}

/// The reference problem in file form.
pub const REFERENCE_TOML: &str = r#"dimension = 1
omega = [[0.0, 1.0]]
lambda = 0.05
s = "0.4"
p = "2"
alpha = "1.5"
r = "3.5"

[nonlinearity]
growth_bound = 1.0
ar_a = 1.0
ar_b = 3.5
t_star = 1.0

[[nonlinearity.terms]]
coefficient = "1"
exponent = "3.5"
mode = "odd-power"
"#;
