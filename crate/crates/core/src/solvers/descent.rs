//! Armijo steepest descent and Newton refinement shared by the solvers.

use nalgebra::{DMatrix, DVector};

use super::{axpy, SolverConfig};
use crate::nonlocal::{dot, euclidean_norm, EnergyFunctional};
use crate::Result;

/// Outcome of one Armijo step.
pub(crate) struct Step {
    pub u: Vec<f64>,
    pub value: f64,
    pub tau: f64,
}

/// Backtracks along the L² steepest-descent direction `-g / |cell|` until
/// the Armijo condition holds. `project` may pull trial points back into a
/// feasible set; the condition is tested after projection.
pub(crate) fn armijo_step(
    f: &EnergyFunctional,
    u: &[f64],
    value: f64,
    g: &[f64],
    tau0: f64,
    cfg: &SolverConfig,
    project: &dyn Fn(Vec<f64>) -> Result<Vec<f64>>,
) -> Result<Option<Step>> {
    let cm = f.domain.cell_measure;
    let d: Vec<f64> = g.iter().map(|v| -v / cm).collect();
    let slope = dot(g, &d);
    if !(slope < 0.0) {
        return Ok(None);
    }
    let mut tau = tau0;
    for _ in 0..80 {
        let trial = project(axpy(u, tau, &d))?;
        if let Ok(v) = f.value(&trial) {
            if v <= value + cfg.armijo_c * tau * slope {
                return Ok(Some(Step { u: trial, value: v, tau }));
            }
        }
        tau *= cfg.backtrack;
    }
    Ok(None)
}

/// How Newton steps are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum NewtonKind {
    /// Cholesky; gives up when the Hessian is not positive definite.
    Minimum,
    /// LU; any nondegenerate critical point.
    Saddle,
}

pub(crate) struct NewtonOutcome {
    pub u: Vec<f64>,
    pub grad_norm: f64,
    pub iterations: usize,
}

/// Newton's method on `∇J = 0` with backtracking on `‖∇J‖`. Returns the
/// last accepted iterate; `accept` may veto iterates (e.g. outside a ball).
pub(crate) fn newton(
    f: &EnergyFunctional,
    u0: &[f64],
    tol: f64,
    kind: NewtonKind,
    max_iters: usize,
    accept: &dyn Fn(&[f64]) -> bool,
) -> Result<NewtonOutcome> {
    let mut u = u0.to_vec();
    let mut g = f.gradient(&u)?;
    let mut gn = euclidean_norm(&g);
    let mut iterations = 0;
    while gn > tol && iterations < max_iters {
        let h: DMatrix<f64> = f.hessian(&u);
        let rhs = DVector::from_iterator(g.len(), g.iter().map(|v| -v));
        let step = match kind {
            NewtonKind::Minimum => h.cholesky().map(|c| c.solve(&rhs)),
            NewtonKind::Saddle => h.lu().solve(&rhs),
        };
        let Some(step) = step else { break };
        let mut tau: f64 = 1.0;
        let mut moved = false;
        while tau >= 1e-6 {
            let trial = axpy(&u, tau, step.as_slice());
            if accept(&trial) {
                if let Ok(tg) = f.gradient(&trial) {
                    let tn = euclidean_norm(&tg);
                    if tn < (1.0 - 1e-4 * tau) * gn {
                        u = trial;
                        g = tg;
                        gn = tn;
                        moved = true;
                        break;
                    }
                }
            }
            tau *= 0.5;
        }
        iterations += 1;
        if !moved {
            break;
        }
    }
    Ok(NewtonOutcome { u, grad_norm: gn, iterations })
}
