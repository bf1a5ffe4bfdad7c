//! Monte Carlo plus local ascent for `sup ‖u‖_{L^{β(x)}} / ‖u‖_{X₀}`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::domain::{DiscreteDomain, GridFunction};
use crate::lebesgue::{luxemburg_with_exponents, node_exponents, signed_pow};
use crate::nonlocal::{dot, euclidean_norm, modular_gradient, x0_norm_slice};
use crate::problem::{PointField, ProblemSpec};
use crate::{Error, Result};

/// Normalized gradient-ascent steps per trial.
pub const ASCENT_STEPS: usize = 50;
const NORM_TOL: f64 = 1e-12;
const FINITE_CAP: f64 = 1e12;

#[derive(Debug, Clone, Serialize)]
pub struct EmbeddingEstimate {
    pub sup_ratio: f64,
    pub maximizer: GridFunction,
    pub trials: usize,
    pub best_trial: usize,
    /// Running maximum after each trial.
    #[serde(skip)]
    pub history: Vec<f64>,
}

struct Ratio<'a> {
    d: &'a DiscreteDomain,
    beta: Vec<f64>,
}

impl Ratio<'_> {
    fn norms(&self, u: &[f64]) -> Result<(f64, f64)> {
        let nb = luxemburg_with_exponents(u, &self.beta, self.d.cell_measure, NORM_TOL)?.norm;
        let nx = x0_norm_slice(u, self.d, NORM_TOL)?.norm;
        Ok((nb, nx))
    }

    fn value(&self, u: &[f64]) -> Result<f64> {
        let (nb, nx) = self.norms(u)?;
        Ok(if nx > 0.0 { nb / nx } else { 0.0 })
    }

    /// `∇ log(‖u‖_β / ‖u‖_{X₀})`, via `∇N = ∇m(v) / ⟨∇m(v), v⟩` at `v = u/N`
    /// for a Luxemburg norm `N` of modular `m`.
    fn log_gradient(&self, u: &[f64], nb: f64, nx: f64) -> Vec<f64> {
        let vb: Vec<f64> = u.iter().map(|x| x / nb).collect();
        let gb: Vec<f64> = vb.iter().zip(&self.beta).map(|(&v, &b)| b * signed_pow(v, b)).collect();
        let db = dot(&gb, &vb);
        let vx: Vec<f64> = u.iter().map(|x| x / nx).collect();
        let gx = modular_gradient(&vx, self.d);
        let dx = dot(&gx, &vx);
        gb.iter().zip(&gx).map(|(a, b)| a / (db * nb) - b / (dx * nx)).collect()
    }

    fn ascend(&self, mut u: Vec<f64>) -> Result<(Vec<f64>, f64)> {
        let mut r = self.value(&u)?;
        let mut eta = 0.1;
        for _ in 0..ASCENT_STEPS {
            let (nb, nx) = self.norms(&u)?;
            let g = self.log_gradient(&u, nb, nx);
            let gn = euclidean_norm(&g);
            let un = euclidean_norm(&u);
            if !(gn > 0.0) {
                break;
            }
            let mut improved = false;
            while eta > 1e-8 {
                let trial: Vec<f64> = u.iter().zip(&g).map(|(x, d)| x + eta * un * d / gn).collect();
                let rt = self.value(&trial)?;
                if rt > r {
                    let n = x0_norm_slice(&trial, self.d, NORM_TOL)?.norm;
                    u = trial.iter().map(|x| x / n).collect();
                    r = rt;
                    eta *= 1.5;
                    improved = true;
                    break;
                }
                eta *= 0.5;
            }
            if !improved {
                break;
            }
        }
        Ok((u, r))
    }
}

/// Sum of one to three Gaussian bumps with random centers, widths and signs.
fn random_start(d: &DiscreteDomain, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let dim = d.dim();
    let mut u = vec![0.0; d.len()];
    for _ in 0..rng.random_range(1..=3) {
        let mut c = [0.0; 2];
        for (k, ck) in c.iter_mut().enumerate().take(dim) {
            *ck = d.omega.lo[k] + d.omega.side(k) * rng.random_range(0.0..1.0);
        }
        let width = d.omega.diameter() * rng.random_range(0.05..0.5);
        let amp = rng.random_range(-1.0..1.0);
        for (v, x) in u.iter_mut().zip(&d.interior) {
            let r2: f64 = (0..dim).map(|k| (x[k] - c[k]).powi(2)).sum();
            *v += amp * (-r2 / (2.0 * width * width)).exp();
        }
    }
    u
}

/// Estimates the embedding constant of `X₀ ↪ L^{β(x)}(Ω)` from below.
///
/// Trial `k` draws from its own ChaCha stream, so the running maximum over
/// the first `k` trials does not depend on the total trial count.
pub fn estimate_embedding_constant(
    spec: &ProblemSpec,
    domain: &DiscreteDomain,
    beta: &PointField,
    trials: usize,
    seed: u64,
) -> Result<EmbeddingEstimate> {
    if trials == 0 {
        return Err(Error::Config("at least one trial required".into()));
    }
    if spec.dimension() != domain.dim() {
        return Err(Error::Config("spec and domain dimensions differ".into()));
    }
    let b = node_exponents(beta, domain);
    for (i, &bi) in b.iter().enumerate() {
        let crit = domain.critical_exponent_at(i);
        if !(bi >= 1.0 && bi < crit) {
            return Err(Error::Domain(format!("β = {bi} at node {i} must lie in [1, p_s*) with p_s* = {crit}")));
        }
    }
    let ratio = Ratio { d: domain, beta: b };
    let results: Vec<Result<(Vec<f64>, f64)>> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let mut u = random_start(domain, &mut rng);
            if u.iter().all(|&v| v == 0.0) {
                u[domain.len() / 2] = 1.0;
            }
            ratio.ascend(u)
        })
        .collect();
    let mut best = (0usize, f64::NEG_INFINITY, Vec::new());
    let mut history = Vec::with_capacity(trials);
    for (k, r) in results.into_iter().enumerate() {
        let (u, v) = r?;
        if v > best.1 {
            best = (k, v, u);
        }
        history.push(best.1);
    }
    let (best_trial, sup_ratio, u) = best;
    if !(sup_ratio.is_finite() && sup_ratio < FINITE_CAP && sup_ratio > 0.0) {
        return Err(Error::numeric("embedding constant", format!("ratio {sup_ratio:e} at trial {best_trial}")));
    }
    Ok(EmbeddingEstimate { sup_ratio, maximizer: GridFunction::new(u)?, trials, best_trial, history })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::build_domain;
    use crate::problem::{presets, SignMode};

    #[test]
    fn zero_trials_is_an_error() {
        let spec = presets::reference(SignMode::OddPower);
        let d = build_domain(&spec, 8, 1.0).unwrap();
        assert!(matches!(estimate_embedding_constant(&spec, &d, &PointField::constant("beta", 2.0), 0, 1), Err(Error::Config(_))));
    }

    #[test]
    fn supercritical_beta_is_rejected() {
        let spec = presets::reference(SignMode::OddPower);
        let d = build_domain(&spec, 8, 1.0).unwrap();
        assert!(matches!(estimate_embedding_constant(&spec, &d, &PointField::constant("beta", 10.5), 1, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn single_bump_ratio_is_finite_and_positive() {
        let spec = presets::reference(SignMode::OddPower);
        let d = build_domain(&spec, 16, 1.0).unwrap();
        let r = Ratio { d: &d, beta: vec![2.0; d.len()] };
        let u = d.sample(|x| (-(x[0] - 0.5).powi(2) / 0.02).exp());
        let v = r.value(u.values()).unwrap();
        assert!(v.is_finite() && v > 0.0);
    }

    #[test]
    fn log_gradient_matches_finite_differences() {
        let spec = presets::variable_1d();
        let d = build_domain(&spec, 12, 1.0).unwrap();
        let r = Ratio { d: &d, beta: d.interior.iter().map(|x| 2.5 + x[0]).collect() };
        let u: Vec<f64> = d.interior.iter().map(|x| (4.0 * x[0]).sin() + 0.3).collect();
        let (nb, nx) = r.norms(&u).unwrap();
        let g = r.log_gradient(&u, nb, nx);
        for j in [0, 5, 11] {
            let eps = 1e-6;
            let mut up = u.clone();
            let mut um = u.clone();
            up[j] += eps;
            um[j] -= eps;
            let fd = (r.value(&up).unwrap().ln() - r.value(&um).unwrap().ln()) / (2.0 * eps);
            assert!((fd - g[j]).abs() < 1e-6 * (1.0 + fd.abs()), "{j}: {fd} vs {}", g[j]);
        }
    }

    #[test]
    fn running_maximum_is_prefix_stable() {
        let spec = presets::reference(SignMode::OddPower);
        let d = build_domain(&spec, 8, 1.0).unwrap();
        let beta = PointField::constant("beta", 3.5);
        let a = estimate_embedding_constant(&spec, &d, &beta, 5, 11).unwrap();
        let b = estimate_embedding_constant(&spec, &d, &beta, 12, 11).unwrap();
        assert_eq!(a.history[..], b.history[..5]);
        assert!(b.history.windows(2).all(|w| w[1] >= w[0]));
        assert!(b.sup_ratio >= a.sup_ratio);
    }
}
