//! The L∞ bootstrap ladder `γ_m = (θ⁻/r⁺)^m` on a computed solution.
//!
//! With `e = r⁺/p⁻` the chain reads
//! `‖u‖_{L^{γ_m θ⁻}} ≤ c^{1/γ_m} γ_m^{e/γ_m} ‖u‖_{L^{γ_m r⁺}}^e`, and
//! `γ_m r⁺ = γ_{m-1} θ⁻` links each rung to the previous one. The constant
//! `c` is measured on the first rung and then tested on all later ones.

use serde::Serialize;

use crate::domain::{DiscreteDomain, GridFunction};
use crate::lebesgue::node_exponents;
use crate::problem::{PointField, ProblemSpec};
use crate::reduce::pairwise_sum;
use crate::{Error, Result};

const CHAIN_SLACK: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct BootstrapConfig {
    pub theta: PointField,
    pub max_steps: usize,
    /// The ladder stops once `γ_m θ⁻` exceeds this exponent.
    pub exponent_cap: f64,
}

impl BootstrapConfig {
    /// `θ ≡ (r⁺ + min p_s*)/2` on the nodes of `domain`.
    pub fn default_for(spec: &ProblemSpec, domain: &DiscreteDomain) -> Self {
        let r_plus = node_exponents(&spec.r, domain).into_iter().fold(f64::NEG_INFINITY, f64::max);
        let crit = (0..domain.len()).map(|i| domain.critical_exponent_at(i)).fold(f64::INFINITY, f64::min);
        let theta = if crit.is_finite() { 0.5 * (r_plus + crit) } else { 2.0 * r_plus };
        BootstrapConfig { theta: PointField::constant("theta", theta), max_steps: 64, exponent_cap: 1e4 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BootstrapReport {
    pub theta_minus: f64,
    pub r_plus: f64,
    pub p_minus: f64,
    /// `r⁺/p⁻`.
    pub chain_exponent: f64,
    /// `γ_1, γ_2, …`
    pub gammas: Vec<f64>,
    /// `γ_m θ⁻`.
    pub exponents: Vec<f64>,
    /// `‖|u|‖_{L^{γ_m θ⁻}(Ω)}`.
    pub norms: Vec<f64>,
    /// `‖|u|‖_{L^{θ⁻}(Ω)}`.
    pub base_norm: f64,
    pub measured_constant: f64,
    /// Right-hand sides of the chain, one per rung.
    pub bounds: Vec<f64>,
    pub steps_ok: Vec<bool>,
    pub bound_chain_ok: bool,
    /// `max |u| ≤ 1`: the ladder is bounded by 1 outright and the chain is
    /// not informative.
    pub chain_trivial: bool,
    /// Norms divided by `|Ω|^{1/q}` are nondecreasing.
    pub monotone: bool,
    pub linf: f64,
}

/// `(∫_Ω |u|^q)^{1/q}` by midpoint quadrature, scaled by `max |u|` so that
/// large `q` does not overflow.
pub fn lq_norm(u: &[f64], q: f64, cell_measure: f64) -> f64 {
    let m = u.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if m == 0.0 {
        return 0.0;
    }
    let t: Vec<f64> = u.iter().map(|v| (v.abs() / m).powf(q)).collect();
    m * (cell_measure * pairwise_sum(&t)).powf(1.0 / q)
}

pub fn bootstrap_linf(u: &GridFunction, spec: &ProblemSpec, domain: &DiscreteDomain, config: &BootstrapConfig) -> Result<BootstrapReport> {
    if u.len() != domain.len() || spec.dimension() != domain.dim() {
        return Err(Error::Config("function, spec and domain do not match".into()));
    }
    let theta = node_exponents(&config.theta, domain);
    for (i, &t) in theta.iter().enumerate() {
        let crit = domain.critical_exponent_at(i);
        if !(t < crit) {
            return Err(Error::Config(format!("θ = {t} at node {i} must stay below p_s* = {crit}")));
        }
    }
    let theta_minus = theta.iter().copied().fold(f64::INFINITY, f64::min);
    let r_plus = node_exponents(&spec.r, domain).into_iter().fold(f64::NEG_INFINITY, f64::max);
    if !(theta_minus > r_plus) {
        return Err(Error::Config(format!("θ⁻ = {theta_minus} must exceed r⁺ = {r_plus}")));
    }
    let p_minus = domain.exponent_range().0;
    let e = r_plus / p_minus;
    let ratio = theta_minus / r_plus;
    let cm = domain.cell_measure;
    let a = u.values();
    let linf = u.linf();
    let base_norm = lq_norm(a, theta_minus, cm);

    let mut gammas = Vec::new();
    let mut exponents = Vec::new();
    let mut norms = Vec::new();
    let mut gamma = 1.0;
    while gammas.len() < config.max_steps {
        gamma *= ratio;
        let q = gamma * theta_minus;
        gammas.push(gamma);
        exponents.push(q);
        norms.push(lq_norm(a, q, cm));
        if q > config.exponent_cap {
            break;
        }
    }

    // ln c from the first rung, where the chain holds with equality.
    let ln = |x: f64| x.ln();
    let ln_c = if base_norm > 0.0 { gammas[0] * (ln(norms[0]) - (e / gammas[0]) * ln(gammas[0]) - e * ln(base_norm)) } else { 0.0 };
    let mut bounds = Vec::with_capacity(norms.len());
    let mut steps_ok = Vec::with_capacity(norms.len());
    for m in 0..norms.len() {
        let prev = if m == 0 { base_norm } else { norms[m - 1] };
        let g = gammas[m];
        let b = if prev > 0.0 { (ln_c / g + (e / g) * ln(g) + e * ln(prev)).exp() } else { 0.0 };
        steps_ok.push(m == 0 || norms[m] <= b * (1.0 + CHAIN_SLACK));
        bounds.push(b);
    }
    let chain_trivial = linf <= 1.0;
    let omega = domain.omega.measure();
    let normalized: Vec<f64> = std::iter::once(base_norm / omega.powf(1.0 / theta_minus))
        .chain(norms.iter().zip(&exponents).map(|(n, q)| n / omega.powf(1.0 / q)))
        .collect();
    let monotone = normalized.windows(2).all(|w| w[1] >= w[0] * (1.0 - CHAIN_SLACK));
    Ok(BootstrapReport {
        theta_minus,
        r_plus,
        p_minus,
        chain_exponent: e,
        gammas,
        exponents,
        norms,
        base_norm,
        measured_constant: ln_c.exp(),
        bounds,
        bound_chain_ok: chain_trivial || steps_ok.iter().all(|&ok| ok),
        steps_ok,
        chain_trivial,
        monotone,
        linf,
    })
}
