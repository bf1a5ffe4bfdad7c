//! Variable-exponent Lebesgue modulars and Luxemburg norms on the grid.

use serde::Serialize;

use crate::domain::{DiscreteDomain, GridFunction};
use crate::problem::PointField;
use crate::reduce::pairwise_sum;
use crate::{Error, Result};

/// A Luxemburg norm together with how well it solves `modular(u / norm) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LuxemburgResult {
    pub norm: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// `t ↦ |t|^β`, exact for the common integer exponents.
#[inline]
pub fn pow_abs(t: f64, beta: f64) -> f64 {
    let a = t.abs();
    if beta == 2.0 {
        a * a
    } else if beta == 1.0 {
        a
    } else if a == 0.0 {
        0.0
    } else {
        a.powf(beta)
    }
}

/// `t ↦ |t|^{β-2} t`, defined as 0 at `t = 0` for every `β > 1`.
#[inline]
pub fn signed_pow(t: f64, beta: f64) -> f64 {
    if beta == 2.0 {
        t
    } else if t == 0.0 {
        0.0
    } else {
        t.signum() * t.abs().powf(beta - 1.0)
    }
}

/// Quadrature of `∫_Ω |u|^{β(x)} dx` with per-node exponents.
pub(crate) fn modular_with_exponents(u: &[f64], exponents: &[f64], cell_measure: f64) -> f64 {
    let terms: Vec<f64> = u.iter().zip(exponents).map(|(&v, &b)| pow_abs(v, b)).collect();
    cell_measure * pairwise_sum(&terms)
}

pub(crate) fn node_exponents(beta: &PointField, domain: &DiscreteDomain) -> Vec<f64> {
    match beta.constant_value() {
        Some(c) => vec![c; domain.len()],
        None => domain.interior.iter().map(|x| beta.eval(x)).collect(),
    }
}

/// `∫_Ω |u(x)|^{β(x)} dx` by midpoint quadrature.
pub fn lebesgue_modular(u: &GridFunction, beta: &PointField, domain: &DiscreteDomain) -> f64 {
    modular_with_exponents(u.values(), &node_exponents(beta, domain), domain.cell_measure)
}

/// Solves `modular(1/λ) = 1` for a strictly decreasing `λ ↦ modular(1/λ)`.
///
/// `scaled(λ)` must return the modular of `u / λ`, and `(lo, hi)` bound the
/// exponents appearing in it. Constant exponents take the closed form
/// `modular(u)^{1/β}`; otherwise the root is bracketed from the norm-modular
/// sandwich and bisected in `log λ`.
pub fn luxemburg_gauge(scaled: impl Fn(f64) -> f64, exponent_range: (f64, f64), tol: f64) -> Result<LuxemburgResult> {
    if !(tol > 0.0) {
        return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
    }
    let (blo, bhi) = exponent_range;
    let m1 = scaled(1.0);
    if !m1.is_finite() {
        return Err(Error::numeric("luxemburg norm", format!("modular is {m1}")));
    }
    if m1 == 0.0 {
        return Ok(LuxemburgResult { norm: 0.0, residual: 0.0, iterations: 0 });
    }
    let check = |norm: f64, iterations: usize| -> Result<LuxemburgResult> {
        let residual = (scaled(norm) - 1.0).abs();
        if !(residual <= tol) {
            return Err(Error::numeric("luxemburg norm", format!("residual {residual:.3e} exceeds tolerance {tol:.3e} at norm {norm}")));
        }
        Ok(LuxemburgResult { norm, residual, iterations })
    };
    if blo == bhi {
        return check(m1.powf(1.0 / blo), 0);
    }

    let (a, b) = if m1 >= 1.0 { (m1.powf(1.0 / bhi), m1.powf(1.0 / blo)) } else { (m1.powf(1.0 / blo), m1.powf(1.0 / bhi)) };
    let mut lo = a * (1.0 - 1e-9);
    let mut hi = b * (1.0 + 1e-9);
    let mut guard = 0;
    while scaled(lo) < 1.0 {
        lo *= 0.5;
        guard += 1;
        if guard > 2000 {
            return Err(Error::numeric("luxemburg norm", "failed to bracket from below"));
        }
    }
    while scaled(hi) > 1.0 {
        hi *= 2.0;
        guard += 1;
        if guard > 2000 {
            return Err(Error::numeric("luxemburg norm", "failed to bracket from above"));
        }
    }
    let mut iterations = 0;
    while hi / lo - 1.0 > 1e-15 && iterations < 200 {
        let mid = (lo * hi).sqrt();
        if mid <= lo || mid >= hi {
            break;
        }
        let m = scaled(mid);
        if !m.is_finite() {
            return Err(Error::numeric("luxemburg norm", format!("modular is {m} at λ = {mid}")));
        }
        if m > 1.0 {
            lo = mid;
        } else if m < 1.0 {
            hi = mid;
        } else {
            lo = mid;
            hi = mid;
        }
        iterations += 1;
    }
    check((lo * hi).sqrt(), iterations)
}

pub(crate) fn luxemburg_with_exponents(u: &[f64], exponents: &[f64], cell_measure: f64, tol: f64) -> Result<LuxemburgResult> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (&v, &b) in u.iter().zip(exponents) {
        if v != 0.0 {
            lo = lo.min(b);
            hi = hi.max(b);
        }
    }
    if lo > hi {
        return Ok(LuxemburgResult { norm: 0.0, residual: 0.0, iterations: 0 });
    }
    let scaled = |lambda: f64| {
        let terms: Vec<f64> = u.iter().zip(exponents).map(|(&v, &b)| pow_abs(v / lambda, b)).collect();
        cell_measure * pairwise_sum(&terms)
    };
    luxemburg_gauge(scaled, (lo, hi), tol)
}

/// `‖u‖_{L^{β(x)}(Ω)}`.
pub fn luxemburg_norm(u: &GridFunction, beta: &PointField, domain: &DiscreteDomain, tol: f64) -> Result<LuxemburgResult> {
    luxemburg_with_exponents(u.values(), &node_exponents(beta, domain), domain.cell_measure, tol)
}

/// Both sides of the variable-exponent Hölder inequality
/// `∫|uv| <= 2 ‖u‖_{β} ‖v‖_{β'}`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct HolderCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

const NORM_TOL: f64 = 1e-10;

pub fn holder_bound_check(u: &GridFunction, v: &GridFunction, beta: &PointField, domain: &DiscreteDomain) -> Result<HolderCheck> {
    let b = node_exponents(beta, domain);
    if let Some(bad) = b.iter().find(|&&x| !(x > 1.0)) {
        return Err(Error::Domain(format!("Hölder check needs β > 1, found {bad}")));
    }
    let conj: Vec<f64> = b.iter().map(|&x| x / (x - 1.0)).collect();
    let prod: Vec<f64> = u.values().iter().zip(v.values()).map(|(a, c)| (a * c).abs()).collect();
    let lhs = domain.cell_measure * pairwise_sum(&prod);
    let nu = luxemburg_with_exponents(u.values(), &b, domain.cell_measure, NORM_TOL)?.norm;
    let nv = luxemburg_with_exponents(v.values(), &conj, domain.cell_measure, NORM_TOL)?.norm;
    let rhs = 2.0 * nu * nv;
    Ok(HolderCheck { lhs, rhs, holds: lhs <= rhs * (1.0 + 1e-9) })
}

/// Both sides of `‖|u|^{μ}‖_{ν} <= ‖u‖_{μν}^{μ⁻} + ‖u‖_{μν}^{μ⁺}`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PowerNormCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn power_norm_bound(u: &GridFunction, mu: &PointField, nu: &PointField, domain: &DiscreteDomain) -> Result<PowerNormCheck> {
    let m = node_exponents(mu, domain);
    let n = node_exponents(nu, domain);
    let mn: Vec<f64> = m.iter().zip(&n).map(|(a, b)| a * b).collect();
    if let Some(i) = mn.iter().position(|&x| !(x >= 1.0)) {
        return Err(Error::Domain(format!("μ ν >= 1 fails at node {i}: μν = {}", mn[i])));
    }
    let powered: Vec<f64> = u.values().iter().zip(&m).map(|(&v, &e)| pow_abs(v, e)).collect();
    let lhs = luxemburg_with_exponents(&powered, &n, domain.cell_measure, NORM_TOL)?.norm;
    let base = luxemburg_with_exponents(u.values(), &mn, domain.cell_measure, NORM_TOL)?.norm;
    let mu_lo = m.iter().copied().fold(f64::INFINITY, f64::min);
    let mu_hi = m.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let rhs = base.powf(mu_lo) + base.powf(mu_hi);
    Ok(PowerNormCheck { lhs, rhs, holds: lhs <= rhs * (1.0 + 1e-9) })
}
