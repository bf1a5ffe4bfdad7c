//! Pointwise inequalities used in the compactness and regularity proofs,
//! and the norm-modular sandwich of `X₀`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::InequalityReport;
use crate::domain::{DiscreteDomain, GridFunction};
use crate::lebesgue::{pow_abs, signed_pow};
use crate::nonlocal::{gagliardo_modular, x0_norm};
use crate::problem::ProblemSpec;
use crate::{Error, Result};

fn simon_sides(x: f64, y: f64, p: f64) -> (f64, f64) {
    let lhs = pow_abs(x - y, p);
    let mono = ((signed_pow(x, p) - signed_pow(y, p)) * (x - y)).max(0.0);
    let rhs = if p < 2.0 {
        let s = pow_abs(x, p) + pow_abs(y, p);
        if s == 0.0 {
            0.0
        } else {
            mono.powf(p / 2.0) * s.powf((2.0 - p) / 2.0) / (p - 1.0)
        }
    } else {
        2f64.powf(p) * mono
    };
    (lhs, rhs)
}

/// `rhs - lhs` of the Simon inequalities for real arguments:
///
/// * `1 < p < 2`: `|x-y|^p ≤ (p-1)⁻¹ [(|x|^{p-2}x - |y|^{p-2}y)(x-y)]^{p/2} (|x|^p + |y|^p)^{(2-p)/2}`
/// * `p ≥ 2`: `|x-y|^p ≤ 2^p (|x|^{p-2}x - |y|^{p-2}y)(x-y)`
pub fn check_simon(x: f64, y: f64, p: f64) -> f64 {
    let (l, r) = simon_sides(x, y, p);
    r - l
}

fn truncation_sides(a: f64, b: f64, m: f64, kappa: f64, p: f64) -> (f64, f64) {
    let (am, bm) = (a.min(m), b.min(m));
    let lhs = signed_pow(a - b, p) * (am.powf(kappa) - bm.powf(kappa));
    let e = (kappa + p - 1.0) / p;
    let rhs = kappa * p.powf(p) / (kappa + p - 1.0).powf(p) * pow_abs(am.powf(e) - bm.powf(e), p);
    (lhs, rhs)
}

/// `rhs - lhs` of
/// `|a-b|^{p-2}(a-b)(a_m^κ - b_m^κ) ≥ κ p^p/(κ+p-1)^p |a_m^{(κ+p-1)/p} - b_m^{(κ+p-1)/p}|^p`
/// with `a_m = min(a, m)`, as left minus right. Requires `a, b, m ≥ 0`,
/// `κ ≥ 1`, `p > 1`.
pub fn check_truncation_inequality(a: f64, b: f64, m: f64, kappa: f64, p: f64) -> f64 {
    let (l, r) = truncation_sides(a, b, m, kappa, p);
    l - r
}

fn power_sides(ux: f64, uy: f64, eta: f64, eta0: f64) -> (f64, f64) {
    ((ux.powf(eta0) - uy.powf(eta0)).abs(), (ux.powf(eta) - uy.powf(eta)).abs())
}

/// `|ux^η - uy^η| - |ux^{η₀} - uy^{η₀}|` for `ux, uy > 1`, `0 ≤ η₀ ≤ η`.
pub fn check_power_comparison(ux: f64, uy: f64, eta: f64, eta0: f64) -> Result<f64> {
    if !(ux > 1.0 && uy > 1.0) {
        return Err(Error::Domain(format!("power comparison needs ux, uy > 1, got ({ux}, {uy})")));
    }
    if !(0.0 <= eta0 && eta0 <= eta) {
        return Err(Error::Domain(format!("power comparison needs 0 ≤ η₀ ≤ η, got η₀ = {eta0}, η = {eta}")));
    }
    let (l, r) = power_sides(ux, uy, eta, eta0);
    Ok(r - l)
}

/// Real numbers spread over several decades, either sign.
fn spread(rng: &mut ChaCha8Rng) -> f64 {
    match rng.random_range(0..4) {
        0 => rng.random_range(-10.0..10.0),
        1 => {
            let mag = 10f64.powf(rng.random_range(-3.0..3.0));
            if rng.random::<bool>() {
                mag
            } else {
                -mag
            }
        }
        2 => 0.0,
        _ => rng.random_range(-1.0..1.0),
    }
}

pub fn simon_suite(samples: usize, seed: u64) -> InequalityReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = InequalityReport::new("simon");
    for _ in 0..samples {
        let x = spread(&mut rng);
        let y = if rng.random_range(0..8) == 0 { x * (1.0 + rng.random_range(-1e-3..1e-3)) } else { spread(&mut rng) };
        let p = if rng.random::<bool>() { rng.random_range(1.001..2.0) } else { rng.random_range(2.0..8.0) };
        let (l, r) = simon_sides(x, y, p);
        rep.record(l, r, &[x, y, p]);
    }
    rep
}

pub fn truncation_suite(samples: usize, seed: u64) -> InequalityReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = InequalityReport::new("truncation");
    for _ in 0..samples {
        let a = rng.random_range(0.0..10.0);
        let b = if rng.random_range(0..8) == 0 { a } else { rng.random_range(0.0..10.0) };
        let m = rng.random_range(0.0..12.0);
        let kappa = rng.random_range(1.0..10.0);
        let p = rng.random_range(1.001..6.0);
        let (l, r) = truncation_sides(a, b, m, kappa, p);
        rep.record(r, l, &[a, b, m, kappa, p]);
    }
    rep
}

pub fn power_comparison_suite(samples: usize, seed: u64) -> InequalityReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = InequalityReport::new("power-comparison");
    for _ in 0..samples {
        let ux = rng.random_range(1.0..100.0f64).max(1.0 + 1e-12);
        let uy = rng.random_range(1.0..100.0f64).max(1.0 + 1e-12);
        let eta = rng.random_range(0.0..5.0);
        let eta0 = rng.random_range(0.0..=eta);
        let (l, r) = power_sides(ux, uy, eta, eta0);
        rep.record(l, r, &[ux, uy, eta, eta0]);
    }
    rep
}

/// Relative slack on the norm for the sandwich clauses; the norm itself is
/// resolved to [`NORM_TOL`] in the modular.
const SANDWICH_SLACK: f64 = 1e-9;
const NORM_TOL: f64 = 1e-12;

/// The norm-modular interplay of `X₀` for one function:
/// `‖u‖ = 1 ⇔ ρ(u) = 1`; `‖u‖ > 1 ⇒ ‖u‖^{p⁻} ≤ ρ(u) ≤ ‖u‖^{p⁺}`;
/// `‖u‖ < 1 ⇒ ‖u‖^{p⁺} ≤ ρ(u) ≤ ‖u‖^{p⁻}`.
pub fn check_norm_modular_interplay(u: &GridFunction, spec: &ProblemSpec, domain: &DiscreteDomain) -> Result<InequalityReport> {
    if spec.dimension() != domain.dim() || u.len() != domain.len() {
        return Err(Error::Config("function, spec and domain do not match".into()));
    }
    if u.is_zero() {
        return Err(Error::Domain("norm-modular interplay needs u ≠ 0".into()));
    }
    let norm = x0_norm(u, domain, NORM_TOL)?.norm;
    let rho = gagliardo_modular(u, domain)?;
    let unit = gagliardo_modular(&u.scaled(1.0 / norm), domain)?;
    let (pmin, pmax) = domain.exponent_range();
    let mut rep = InequalityReport::new("norm-modular");
    rep.record((unit - 1.0).abs(), NORM_TOL, &[norm, unit]);
    let (lo_n, hi_n) = (norm * (1.0 - SANDWICH_SLACK), norm * (1.0 + SANDWICH_SLACK));
    if norm > 1.0 {
        rep.record(lo_n.powf(pmin), rho, &[norm, rho, pmin]);
        rep.record(rho, hi_n.powf(pmax), &[norm, rho, pmax]);
    } else {
        rep.record(lo_n.powf(pmax), rho, &[norm, rho, pmax]);
        rep.record(rho, hi_n.powf(pmin), &[norm, rho, pmin]);
    }
    Ok(rep)
}

/// [`check_norm_modular_interplay`] on `count` random functions, half
/// rescaled below norm one and half above.
pub fn norm_modular_suite(spec: &ProblemSpec, domain: &DiscreteDomain, count: usize, seed: u64) -> Result<InequalityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = InequalityReport::new("norm-modular");
    for k in 0..count {
        let raw: Vec<f64> = (0..domain.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let v = GridFunction::new(raw)?;
        let n = x0_norm(&v, domain, NORM_TOL)?.norm;
        let exponent = rng.random_range(0.05..1.5);
        let target = if k % 2 == 0 { 10f64.powf(-exponent) } else { 10f64.powf(exponent) };
        rep.merge(check_norm_modular_interplay(&v.scaled(target / n), spec, domain)?);
    }
    Ok(rep)
}
