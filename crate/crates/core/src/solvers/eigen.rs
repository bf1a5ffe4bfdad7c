//! The eigenvalue problem `A(u) = λ |u|^{p(x,x)-2} u` as a constrained
//! critical value.
//!
//! The Gagliardo energy `G(u) = Σ w|Δu|^p/p + tail` is minimized over
//! `C(u) = ∫ |u|^{p(x,x)}/p(x,x) = 1` by projected gradient descent, with
//! the multiplier estimate `λ = ⟨A(u), u⟩ / ⟨|u|^{p(x,x)-2}u, u⟩`, then
//! refined by Newton's method on the Lagrange system.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::local_min::random_bump;
use super::{axpy, Solution, SolutionKind, SolverConfig};
use crate::domain::{DiscreteDomain, GridFunction};
use crate::lebesgue::{luxemburg_gauge, pow_abs, signed_pow};
use crate::nonlocal::{apply_operator_slice, dot, euclidean_norm, gagliardo_hessian, EnergyFunctional};
use crate::problem::ProblemSpec;
use crate::reduce::pairwise_sum;
use crate::{Error, Result};

/// Recorded with every eigen-solution: variable `p` admits no canonical
/// normalization, so this one is stated explicitly.
pub const EIGEN_NORMALIZATION: &str = "constrained critical value of the Gagliardo energy on {∫ |u|^p(x,x) / p(x,x) dx = 1}";

#[derive(Debug, Clone, Serialize)]
pub struct EigenSolution {
    pub solution: Solution,
    pub lambda_estimate: f64,
    /// `‖A(u) - λ |u|^{p(x,x)-2} u‖₂`.
    pub residual: f64,
    pub normalization: &'static str,
    pub restarts: usize,
}

struct Problem<'a> {
    d: &'a DiscreteDomain,
}

impl Problem<'_> {
    fn energy(&self, u: &[f64]) -> Result<f64> {
        Ok(EnergyFunctional::new(self.d, 0.0).breakdown(u)?.gagliardo_term)
    }

    fn constraint(&self, u: &[f64]) -> f64 {
        let t: Vec<f64> = u.iter().enumerate().map(|(i, &v)| pow_abs(v, self.d.diag_exponent(i)) / self.d.diag_exponent(i)).collect();
        self.d.cell_measure * pairwise_sum(&t)
    }

    fn phi(&self, u: &[f64]) -> Vec<f64> {
        u.iter().enumerate().map(|(i, &v)| signed_pow(v, self.d.diag_exponent(i))).collect()
    }

    /// Rescales `u` onto `C = 1`.
    fn normalize(&self, u: &[f64]) -> Result<Vec<f64>> {
        let (lo, hi) =
            (0..u.len()).map(|i| self.d.diag_exponent(i)).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p), b.max(p)));
        let g = luxemburg_gauge(|l| self.constraint(&u.iter().map(|v| v / l).collect::<Vec<f64>>()), (lo, hi), 1e-13)?;
        if !(g.norm > 0.0) {
            return Err(Error::Solver("eigenfunction iterate collapsed to zero".into()));
        }
        Ok(u.iter().map(|v| v / g.norm).collect())
    }

    /// `(λ, A(u) - λ φ(u))`.
    fn multiplier(&self, u: &[f64]) -> (f64, Vec<f64>) {
        let a = apply_operator_slice(u, self.d);
        let ph = self.phi(u);
        let lambda = dot(&a, u) / dot(&ph, u);
        let r = a.iter().zip(&ph).map(|(x, y)| x - lambda * y).collect();
        (lambda, r)
    }

    /// Newton on `(∇G - λ∇C, C - 1) = 0` from `(u, λ)`.
    fn newton_step(&self, u: &[f64], lambda: f64) -> Option<(Vec<f64>, f64)> {
        let n = u.len();
        let cm = self.d.cell_measure;
        let hg = gagliardo_hessian(u, self.d);
        let a = apply_operator_slice(u, self.d);
        let ph = self.phi(u);
        let mut m = DMatrix::zeros(n + 1, n + 1);
        let mut rhs = DVector::zeros(n + 1);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = hg[(i, j)];
            }
            let p = self.d.diag_exponent(i);
            let curv = if p == 2.0 { 1.0 } else { (p - 1.0) * u[i].abs().max(1e-12).powf(p - 2.0) };
            m[(i, i)] -= lambda * cm * curv;
            m[(i, n)] = -cm * ph[i];
            m[(n, i)] = cm * ph[i];
            rhs[i] = -(cm * a[i] - lambda * cm * ph[i]);
        }
        rhs[n] = -(self.constraint(u) - 1.0);
        let step = m.lu().solve(&rhs)?;
        Some((axpy(u, 1.0, &step.as_slice()[..n]), lambda + step[n]))
    }
}

/// The constrained eigenpair reached from the profile `ξ` (and seeded
/// random bumps on restart).
pub fn solve_eigenproblem(spec: &ProblemSpec, domain: &DiscreteDomain, config: &SolverConfig) -> Result<EigenSolution> {
    config.validate()?;
    if spec.dimension() != domain.dim() {
        return Err(Error::Config("domain was built for a different dimension".into()));
    }
    let pr = Problem { d: domain };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x6569_6765);
    let mut last_err = None;
    for restart in 0..=config.restarts {
        let start = if restart == 0 { config.xi.sample(domain).into_vec() } else { random_bump(domain, &mut rng) };
        match attempt(&pr, &start, config) {
            Ok((u, lambda, residual, iterations)) => {
                let energy = pr.energy(&u)?;
                let u = GridFunction::new(u)?;
                let converged = residual <= config.grad_tol * (1.0 + lambda.abs());
                let solution = Solution {
                    linf_norm: u.linf(),
                    u,
                    energy,
                    grad_norm: residual,
                    kind: SolutionKind::Eigenfunction,
                    iterations,
                    converged,
                    ball_radius: None,
                    barrier_estimate: None,
                    path_endpoint: None,
                };
                return Ok(EigenSolution {
                    solution,
                    lambda_estimate: lambda,
                    residual,
                    normalization: EIGEN_NORMALIZATION,
                    restarts: restart,
                });
            }
            Err(e) => last_err = Some(e),
        }
    }
    Err(Error::Solver(format!("eigen-solver failed after {} restarts: {}", config.restarts, last_err.expect("at least one attempt"))))
}

fn attempt(pr: &Problem, start: &[f64], cfg: &SolverConfig) -> Result<(Vec<f64>, f64, f64, usize)> {
    let mut u = pr.normalize(start)?;
    let mut g = pr.energy(&u)?;
    let (mut lambda, mut r) = pr.multiplier(&u);
    let mut rn = euclidean_norm(&r);
    let target = |l: f64| cfg.grad_tol * (1.0 + l.abs());
    let mut switch = (1e-3 * rn).max(target(lambda));
    let mut tau: f64 = 1.0;
    let mut iterations = 0;
    while rn > target(lambda) && iterations < cfg.max_iters {
        if cfg.newton_polish && rn <= switch {
            let (mut v, mut l) = (u.clone(), lambda);
            let mut best = (u.clone(), lambda, rn);
            for _ in 0..30 {
                let Some((nv, _)) = pr.newton_step(&v, l) else { break };
                v = pr.normalize(&nv)?;
                let (nl, nr) = pr.multiplier(&v);
                l = nl;
                let n = euclidean_norm(&nr);
                iterations += 1;
                if n < best.2 {
                    best = (v.clone(), l, n);
                }
                if n <= target(l) {
                    break;
                }
            }
            if best.2 < rn {
                u = best.0;
                let (l2, r2) = pr.multiplier(&u);
                lambda = l2;
                r = r2;
                rn = euclidean_norm(&r);
                g = pr.energy(&u)?;
            }
            if rn <= target(lambda) {
                break;
            }
            switch = (0.01 * switch).max(target(lambda));
        }
        let mut accepted = false;
        let mut t = (2.0 * tau).min(1e8);
        for _ in 0..80 {
            let trial = pr.normalize(&axpy(&u, -t, &r))?;
            let e = pr.energy(&trial)?;
            if e <= g - 1e-4 * t * pr.d.cell_measure * rn * rn {
                u = trial;
                g = e;
                tau = t;
                accepted = true;
                break;
            }
            t *= cfg.backtrack;
        }
        iterations += 1;
        let (l, nr) = pr.multiplier(&u);
        lambda = l;
        r = nr;
        rn = euclidean_norm(&r);
        if !accepted {
            break;
        }
    }
    if u.iter().all(|v| v.abs() < 1e-300) {
        return Err(Error::Solver("eigenfunction iterate collapsed to zero".into()));
    }
    Ok((u, lambda, rn, iterations))
}
