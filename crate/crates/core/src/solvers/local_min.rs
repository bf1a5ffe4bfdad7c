//! The negative-energy local minimizer in a small `X₀` ball.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::descent::{armijo_step, newton, NewtonKind};
use super::{check_lambda, Solution, SolutionKind, SolverConfig};
use crate::domain::DiscreteDomain;
use crate::nonlocal::{euclidean_norm, x0_norm_slice, EnergyFunctional};
use crate::problem::{require_multiplicity, ProblemSpec};
use crate::{Error, Result};

const NORM_TOL: f64 = 1e-12;
const SCAN_RADII: [f64; 10] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];
const SCAN_RANDOM_DIRECTIONS: usize = 6;

/// Sampled energies on spheres `‖u‖_{X₀} = δ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BarrierScan {
    pub radius: f64,
    /// `min J` over the sampled directions at `radius`.
    pub zeta: f64,
    /// `(δ, min J)` for every scanned radius.
    pub table: Vec<(f64, f64)>,
}

/// Scans `δ ∈ {0.1, …, 1}` and keeps the radius with the largest minimal
/// sampled energy on its sphere.
pub fn barrier_scan(f: &EnergyFunctional, config: &SolverConfig) -> Result<BarrierScan> {
    let d = f.domain;
    let mut dirs = vec![config.xi.sample(d).into_vec(), config.phi.sample(d).into_vec()];
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x6261_7272);
    for _ in 0..SCAN_RANDOM_DIRECTIONS {
        dirs.push(random_bump(d, &mut rng));
    }
    let mut unit = Vec::new();
    for v in dirs {
        let n = x0_norm_slice(&v, d, NORM_TOL)?.norm;
        if n > 0.0 {
            unit.push(v.iter().map(|x| x / n).collect::<Vec<f64>>());
        }
    }
    if unit.is_empty() {
        return Err(Error::Config("barrier scan needs a nonzero profile".into()));
    }
    let mut table = Vec::with_capacity(SCAN_RADII.len());
    for &delta in &SCAN_RADII {
        let mut zeta = f64::INFINITY;
        for v in &unit {
            let u: Vec<f64> = v.iter().map(|x| delta * x).collect();
            zeta = zeta.min(f.value(&u)?);
        }
        table.push((delta, zeta));
    }
    let (radius, zeta) = table.iter().copied().fold((f64::NAN, f64::NEG_INFINITY), |best, row| if row.1 > best.1 { row } else { best });
    if !(zeta > 0.0) {
        return Err(Error::Solver(format!(
            "no positive energy barrier on spheres of radius ≤ 1 (best min J = {zeta:.3e}); try a smaller lambda"
        )));
    }
    Ok(BarrierScan { radius, zeta, table })
}

/// A positive Gaussian bump with random center and width.
pub(crate) fn random_bump(d: &DiscreteDomain, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let dim = d.dim();
    let mut c = [0.0; 2];
    for (k, ck) in c.iter_mut().enumerate().take(dim) {
        *ck = d.omega.lo[k] + d.omega.side(k) * rng.random_range(0.2..0.8);
    }
    let width = rng.random_range(0.1..0.4) * d.omega.diameter();
    d.interior
        .iter()
        .map(|x| {
            let r2: f64 = (0..dim).map(|k| (x[k] - c[k]).powi(2)).sum();
            (-r2 / (2.0 * width * width)).exp()
        })
        .collect()
}

/// Armijo descent from `tφ` (small `t`) inside the ball `‖u‖_{X₀} ≤ δ`,
/// with radial projection onto the ball.
pub fn find_local_min(spec: &ProblemSpec, domain: &DiscreteDomain, lambda: f64, config: &SolverConfig) -> Result<Solution> {
    config.validate()?;
    check_lambda(lambda)?;
    require_multiplicity(spec)?;
    run(&EnergyFunctional::new(domain, lambda), config)
}

pub(crate) fn run(f: &EnergyFunctional, cfg: &SolverConfig) -> Result<Solution> {
    let d = f.domain;
    let (delta, zeta) = match cfg.ball_radius {
        Some(r) => (r, None),
        None => {
            let scan = barrier_scan(f, cfg)?;
            (scan.radius, Some(scan.zeta))
        }
    };
    let norm = |u: &[f64]| x0_norm_slice(u, d, NORM_TOL).map(|r| r.norm);
    let project = |u: Vec<f64>| -> Result<Vec<f64>> {
        let n = norm(&u)?;
        Ok(if n > delta { u.iter().map(|x| x * delta / n).collect() } else { u })
    };

    let phi = cfg.phi.sample(d).into_vec();
    let mut u = vec![0.0; d.len()];
    let phi_norm = norm(&phi)?;
    if phi_norm > 0.0 {
        let mut t = 0.5 * delta / phi_norm;
        for _ in 0..60 {
            let trial: Vec<f64> = phi.iter().map(|x| t * x).collect();
            let below = f.value(&trial)? < 0.0;
            u = trial;
            if below {
                break;
            }
            t *= 0.5;
        }
    }

    let mut value = f.value(&u)?;
    let mut g = f.gradient(&u)?;
    let mut gn = euclidean_norm(&g);
    let mut switch = (1e-3 * gn).max(cfg.grad_tol);
    let mut tau: f64 = 1.0;
    let mut iterations = 0;
    while gn > cfg.grad_tol && iterations < cfg.max_iters {
        if cfg.newton_polish && gn <= switch {
            let inside = |v: &[f64]| norm(v).map(|n| n <= delta).unwrap_or(false);
            let out = newton(f, &u, cfg.grad_tol, NewtonKind::Minimum, 50, &inside)?;
            iterations += out.iterations;
            if out.grad_norm < gn && f.value(&out.u)? <= value {
                u = out.u;
                value = f.value(&u)?;
                g = f.gradient(&u)?;
                gn = out.grad_norm;
            }
            if gn <= cfg.grad_tol {
                break;
            }
            switch = (0.01 * switch).max(cfg.grad_tol);
        }
        let Some(step) = armijo_step(f, &u, value, &g, (2.0 * tau).min(1e8), cfg, &project)? else { break };
        tau = step.tau;
        u = step.u;
        value = step.value;
        g = f.gradient(&u)?;
        gn = euclidean_norm(&g);
        iterations += 1;
    }
    let mut sol = Solution::from_point(f, u, SolutionKind::LocalMin, iterations, cfg.grad_tol)?;
    sol.ball_radius = Some(delta);
    sol.barrier_estimate = zeta;
    Ok(sol)
}
