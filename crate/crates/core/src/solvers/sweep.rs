//! Scanning λ for the two-solution regime.

use rayon::prelude::*;
use serde::Serialize;

use super::{linf_distance, local_min, mountain_pass, Solution, SolverConfig};
use crate::domain::DiscreteDomain;
use crate::nonlocal::EnergyFunctional;
use crate::problem::{require_multiplicity, ProblemSpec};
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub local_min_found: bool,
    pub local_min_energy: Option<f64>,
    pub mountain_pass_found: bool,
    pub mountain_pass_energy: Option<f64>,
    /// `‖u₁ - u₂‖_∞` when both solves returned.
    pub separation: Option<f64>,
    pub distinct: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<String>,
    #[serde(skip)]
    pub mountain_pass: Option<Solution>,
    #[serde(skip)]
    pub local_min: Option<Solution>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    /// Largest λ of the grid with two distinct solutions.
    pub lambda_star: Option<f64>,
}

impl SweepReport {
    /// The row at `lambda_star`.
    pub fn best(&self) -> Option<&SweepRow> {
        let l = self.lambda_star?;
        self.rows.iter().find(|r| r.lambda == l)
    }
}

/// Two converged solutions count as distinct when
/// `‖u₁ - u₂‖_∞ > 10⁻³ (1 + ‖u₁‖_∞)` and `J(u₁) > 0 > J(u₂)`.
pub fn distinct(mp: &Solution, lm: &Solution) -> bool {
    mp.converged
        && lm.converged
        && mp.energy > 0.0
        && lm.energy < 0.0
        && linf_distance(mp.u.values(), lm.u.values()) > 1e-3 * (1.0 + mp.linf_norm)
}

/// Runs both solvers at every λ of an increasing positive grid, on the
/// truncated energy when the nonlinearity is in positive-part mode. Failed
/// solves are recorded in their row.
pub fn lambda_sweep(spec: &ProblemSpec, domain: &DiscreteDomain, lambda_grid: &[f64], config: &SolverConfig) -> Result<SweepReport> {
    config.validate()?;
    if lambda_grid.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
        return Err(Error::Config("lambda grid entries must be positive".into()));
    }
    if lambda_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("lambda grid must be strictly increasing".into()));
    }
    if !lambda_grid.is_empty() {
        require_multiplicity(spec)?;
    }
    let positive = spec.nonlinearity.is_positive_part();
    let rows: Vec<SweepRow> = lambda_grid.par_iter().map(|&lambda| sweep_row(domain, lambda, positive, config)).collect();
    let lambda_star = rows.iter().filter(|r| r.distinct).map(|r| r.lambda).fold(None, |m: Option<f64>, l| Some(m.map_or(l, |m| m.max(l))));
    Ok(SweepReport { rows, lambda_star })
}

fn sweep_row(domain: &DiscreteDomain, lambda: f64, positive: bool, config: &SolverConfig) -> SweepRow {
    let f = if positive { EnergyFunctional::positive_part(domain, lambda) } else { EnergyFunctional::new(domain, lambda) };
    let mut errors = Vec::new();
    let lm = local_min::run(&f, config).map_err(|e| errors.push(format!("local_min: {e}"))).ok();
    let mp = mountain_pass::run(&f, config).map_err(|e| errors.push(format!("mountain_pass: {e}"))).ok();
    let separation = match (&mp, &lm) {
        (Some(a), Some(b)) => Some(linf_distance(a.u.values(), b.u.values())),
        _ => None,
    };
    SweepRow {
        lambda,
        local_min_found: lm.as_ref().is_some_and(|s| s.converged),
        local_min_energy: lm.as_ref().map(|s| s.energy),
        mountain_pass_found: mp.as_ref().is_some_and(|s| s.converged),
        mountain_pass_energy: mp.as_ref().map(|s| s.energy),
        separation,
        distinct: matches!((&mp, &lm), (Some(a), Some(b)) if distinct(a, b)),
        errors,
        mountain_pass: mp,
        local_min: lm,
    }
}
