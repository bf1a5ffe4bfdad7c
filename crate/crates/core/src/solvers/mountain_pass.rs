//! Path-deformation mountain pass.
//!
//! The path starts as the segment `0 → Tξ` with `J(Tξ) < 0`. Each iteration
//! moves the highest path point one Armijo step downhill; points are added
//! next to it when it drifts away from its neighbours. Once the gradient at
//! the path maximum is small, Newton's method finishes the saddle.

use super::descent::{armijo_step, newton, NewtonKind};
use super::{check_lambda, linf_distance, Solution, SolutionKind, SolverConfig};
use crate::domain::DiscreteDomain;
use crate::nonlocal::{euclidean_norm, EnergyFunctional};
use crate::problem::{require_multiplicity, ProblemSpec};
use crate::{Error, Result};

const MAX_DOUBLINGS: usize = 200;

pub fn mountain_pass(spec: &ProblemSpec, domain: &DiscreteDomain, lambda: f64, config: &SolverConfig) -> Result<Solution> {
    config.validate()?;
    check_lambda(lambda)?;
    require_multiplicity(spec)?;
    run(&EnergyFunctional::new(domain, lambda), config)
}

fn endpoint(f: &EnergyFunctional, xi: &[f64]) -> Result<f64> {
    let mut t = 1.0;
    for _ in 0..MAX_DOUBLINGS {
        let v: Vec<f64> = xi.iter().map(|x| t * x).collect();
        if f.value(&v)? < 0.0 {
            return Ok(t);
        }
        t *= 2.0;
    }
    Err(Error::Solver(format!("J(Tξ) stayed nonnegative up to T = {t:e}; the profile ξ does not see the superlinear term")))
}

pub(crate) fn run(f: &EnergyFunctional, cfg: &SolverConfig) -> Result<Solution> {
    let d = f.domain;
    let xi = cfg.xi.sample(d).into_vec();
    if xi.iter().all(|&v| v == 0.0) {
        return Err(Error::Config("mountain pass needs a nonzero profile xi".into()));
    }
    let big_t = endpoint(f, &xi)?;
    let n0 = cfg.path_points;
    let mut path: Vec<Vec<f64>> = (0..n0).map(|k| xi.iter().map(|x| big_t * x * k as f64 / (n0 - 1) as f64).collect()).collect();
    let mut energies = path.iter().map(|z| f.value(z)).collect::<Result<Vec<f64>>>()?;
    let spacing = big_t * xi.iter().fold(0.0f64, |m, v| m.max(v.abs())) / (n0 - 1) as f64;
    let max_points = 32 * n0;

    let mut tau: f64 = 1.0;
    let mut iterations = 0;
    let mut switch: Option<f64> = None;
    let mut best: Option<(Vec<f64>, f64)> = None;
    loop {
        let mut k = argmax(&energies);
        let mut refinements = 0;
        while (k == 0 || k == path.len() - 1) && refinements < 60 && path.len() < max_points {
            let (a, b) = if k == 0 { (0, 1) } else { (k - 1, k) };
            let mid = midpoint(&path[a], &path[b]);
            let e = f.value(&mid)?;
            path.insert(b, mid);
            energies.insert(b, e);
            k = argmax(&energies);
            refinements += 1;
        }
        if k == 0 || k == path.len() - 1 {
            return Err(Error::Solver(format!(
                "mountain-pass path collapsed: the maximum sits at the {} endpoint; try a larger T (profile amplitude) or a smaller lambda",
                if k == 0 { "zero" } else { "far" }
            )));
        }
        let g = f.gradient(&path[k])?;
        let gn = euclidean_norm(&g);
        if best.as_ref().is_none_or(|b| gn < b.1) {
            best = Some((path[k].clone(), gn));
        }
        let sw = *switch.get_or_insert((1e-3 * gn).max(cfg.grad_tol));
        if gn <= cfg.grad_tol || iterations >= cfg.max_iters {
            break;
        }
        if cfg.newton_polish && gn <= sw {
            let positive = |v: &[f64]| f.value(v).map(|e| e > 0.0).unwrap_or(false);
            let out = newton(f, &path[k], cfg.grad_tol, NewtonKind::Saddle, 50, &positive)?;
            iterations += out.iterations;
            if out.grad_norm <= cfg.grad_tol {
                best = Some((out.u, out.grad_norm));
                break;
            }
            switch = Some((0.01 * sw).max(cfg.grad_tol));
        }
        let keep = |v: Vec<f64>| -> Result<Vec<f64>> { Ok(v) };
        // A free step would dive along the unbounded-below direction; keep
        // the moved point within half a path spacing.
        let gmax = g.iter().fold(0.0f64, |m, v| m.max(v.abs())) / d.cell_measure;
        let cap = if gmax > 0.0 { 0.5 * spacing / gmax } else { 1.0 };
        match armijo_step(f, &path[k], energies[k], &g, (2.0 * tau).min(cap), cfg, &keep)? {
            Some(step) => {
                tau = step.tau;
                path[k] = step.u;
                energies[k] = step.value;
            }
            None => break,
        }
        iterations += 1;
        // Keep the path resolved around its maximum: split a neighbouring
        // segment when it is long or hides a higher midpoint.
        for nb in [k + 1, k - 1] {
            if path.len() >= max_points {
                break;
            }
            let (a, b) = (nb.min(k), nb.max(k));
            let mid = midpoint(&path[a], &path[b]);
            let e = f.value(&mid)?;
            if e > energies[a].max(energies[b]) || linf_distance(&path[a], &path[b]) > 2.0 * spacing {
                path.insert(b, mid);
                energies.insert(b, e);
                break;
            }
        }
    }
    let (u, _) = best.expect("at least one path maximum was examined");
    let mut sol = Solution::from_point(f, u, SolutionKind::MountainPass, iterations, cfg.grad_tol)?;
    sol.path_endpoint = Some(big_t);
    Ok(sol)
}

fn midpoint(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect()
}

fn argmax(v: &[f64]) -> usize {
    let mut k = 0;
    for (i, &e) in v.iter().enumerate() {
        if e > v[k] {
            k = i;
        }
    }
    k
}
