//! The Gagliardo modular, the `X₀` norm, the nonlocal operator, and the
//! energy functional.
//!
//! All double integrals are sums over unordered node pairs: interior pairs
//! `i < j`, interior-collar pairs (where only `u_i` is nonzero), and the
//! closed-form tail beyond the collar. With this normalization the critical
//! points of the energy solve `A(u) = λ|u|^{α-2}u + f(x,u)` exactly, where
//! `A` is the principal-value operator.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::domain::{CollarRow, DiscreteDomain, GridFunction};
use crate::lebesgue::{luxemburg_gauge, pow_abs, signed_pow, LuxemburgResult};
use crate::problem::{derivative_frozen, eval_frozen};
use crate::reduce::{map_rows, pairwise_sum};
use crate::{Error, Result};

/// Modular of `u / lambda` restricted to row `i` (partners `j > i`, collar, tail).
fn modular_row(u: &[f64], d: &DiscreteDomain, i: usize, inv: f64) -> f64 {
    let k = &d.kernel;
    let ui = u[i] * inv;
    let mut terms = Vec::with_capacity(k.n - i + 2);
    for j in (i + 1)..k.n {
        terms.push(k.w(i, j) * pow_abs(ui - u[j] * inv, k.p(i, j)));
    }
    terms.push(collar_sum(&k.collar[i], ui, |w, p, t| w * pow_abs(t, p)));
    terms.push(d.cell_measure * d.nodes.tail[i] * pow_abs(ui, d.nodes.p_diag[i]));
    pairwise_sum(&terms)
}

#[inline]
fn collar_sum(row: &CollarRow, t: f64, term: impl Fn(f64, f64, f64) -> f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    match row {
        CollarRow::Uniform { weight, exponent } => term(*weight, *exponent, t),
        CollarRow::Mixed { weights, exponents } => {
            let v: Vec<f64> = weights.iter().zip(exponents).map(|(&w, &p)| term(w, p, t)).collect();
            pairwise_sum(&v)
        }
    }
}

fn scaled_modular(u: &[f64], d: &DiscreteDomain, inv: f64) -> f64 {
    let rows = map_rows(d.len(), |i| modular_row(u, d, i, inv));
    pairwise_sum(&rows)
}

/// Finds the first non-finite contribution for error reporting.
fn overflow_witness(u: &[f64], d: &DiscreteDomain) -> Error {
    let k = &d.kernel;
    for i in 0..k.n {
        for j in (i + 1)..k.n {
            let v = k.w(i, j) * pow_abs(u[i] - u[j], k.p(i, j));
            if !v.is_finite() {
                return Error::numeric("gagliardo modular", format!("pair ({i}, {j}) contributes {v}"));
            }
        }
        let c = collar_sum(&k.collar[i], u[i], |w, p, t| w * pow_abs(t, p)) + d.nodes.tail[i] * pow_abs(u[i], d.nodes.p_diag[i]);
        if !c.is_finite() {
            return Error::numeric("gagliardo modular", format!("exterior pairs of node {i} contribute {c}"));
        }
    }
    Error::numeric("gagliardo modular", "sum overflowed")
}

/// `ρ(u) = Σ_{pairs} w_ij |u_i - u_j|^{p_ij} + Σ_i |u_i|^{p(x_i,x_i)} tail(x_i) |cell|`.
pub fn gagliardo_modular(u: &GridFunction, domain: &DiscreteDomain) -> Result<f64> {
    let v = scaled_modular(u.values(), domain, 1.0);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(overflow_witness(u.values(), domain))
    }
}

/// `‖u‖_{X₀}`: the Luxemburg gauge of [`gagliardo_modular`].
pub fn x0_norm(u: &GridFunction, domain: &DiscreteDomain, tol: f64) -> Result<LuxemburgResult> {
    x0_norm_slice(u.values(), domain, tol)
}

pub(crate) fn x0_norm_slice(u: &[f64], domain: &DiscreteDomain, tol: f64) -> Result<LuxemburgResult> {
    if !scaled_modular(u, domain, 1.0).is_finite() {
        return Err(overflow_witness(u, domain));
    }
    luxemburg_gauge(|lambda| scaled_modular(u, domain, 1.0 / lambda), domain.exponent_range(), tol)
}

/// Row `i` of the operator, multiplied by the cell measure.
fn operator_row(u: &[f64], d: &DiscreteDomain, i: usize) -> f64 {
    let k = &d.kernel;
    let ui = u[i];
    let mut terms = Vec::with_capacity(k.n + 1);
    for j in 0..k.n {
        if j != i {
            terms.push(k.w(i, j) * signed_pow(ui - u[j], k.p(i, j)));
        }
    }
    terms.push(collar_sum(&k.collar[i], ui, |w, p, t| w * signed_pow(t, p)));
    terms.push(d.cell_measure * d.nodes.tail[i] * signed_pow(ui, d.nodes.p_diag[i]));
    pairwise_sum(&terms)
}

/// `A(u)_i = Σ_{j≠i} (w_ij/|cell|) |u_i-u_j|^{p_ij-2}(u_i-u_j) + |u_i|^{p_ii-2} u_i tail(x_i)`,
/// with `j` over interior and collar nodes.
pub fn apply_operator(u: &GridFunction, domain: &DiscreteDomain) -> GridFunction {
    GridFunction::from_vec_unchecked(apply_operator_slice(u.values(), domain))
}

pub(crate) fn apply_operator_slice(u: &[f64], domain: &DiscreteDomain) -> Vec<f64> {
    let cm = domain.cell_measure;
    map_rows(domain.len(), |i| operator_row(u, domain, i) / cm)
}

/// Gradient of `ρ` itself (no `1/p` weights).
pub fn modular_gradient(u: &[f64], domain: &DiscreteDomain) -> Vec<f64> {
    let k = &domain.kernel;
    map_rows(domain.len(), |i| {
        let ui = u[i];
        let mut terms = Vec::with_capacity(k.n + 1);
        for j in 0..k.n {
            if j != i {
                let p = k.p(i, j);
                terms.push(k.w(i, j) * p * signed_pow(ui - u[j], p));
            }
        }
        terms.push(collar_sum(&k.collar[i], ui, |w, p, t| w * p * signed_pow(t, p)));
        let pd = domain.nodes.p_diag[i];
        terms.push(domain.cell_measure * domain.nodes.tail[i] * pd * signed_pow(ui, pd));
        pairwise_sum(&terms)
    })
}

/// Whether the concave and convex terms see `u` or `u⁺`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Truncation {
    None,
    PositivePart,
}

/// The three summands of the energy and their combination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyBreakdown {
    pub gagliardo_term: f64,
    pub concave_term: f64,
    pub convex_term: f64,
    pub total: f64,
}

/// `J_λ` (or `J_λ⁺`) on a fixed domain.
#[derive(Debug, Clone, Copy)]
pub struct EnergyFunctional<'a> {
    pub domain: &'a DiscreteDomain,
    pub lambda: f64,
    pub truncation: Truncation,
}

/// Curvature `(β-1)|t|^{β-2}`, with `|t|` floored for `β < 2` so the
/// Newton matrices stay finite.
#[inline]
fn curvature(t: f64, beta: f64) -> f64 {
    if beta == 2.0 {
        1.0
    } else {
        (beta - 1.0) * t.abs().max(CURVATURE_FLOOR).powf(beta - 2.0)
    }
}

const CURVATURE_FLOOR: f64 = 1e-12;

impl<'a> EnergyFunctional<'a> {
    pub fn new(domain: &'a DiscreteDomain, lambda: f64) -> Self {
        EnergyFunctional { domain, lambda, truncation: Truncation::None }
    }

    pub fn positive_part(domain: &'a DiscreteDomain, lambda: f64) -> Self {
        EnergyFunctional { domain, lambda, truncation: Truncation::PositivePart }
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    #[inline]
    fn concave_arg(&self, t: f64) -> f64 {
        match self.truncation {
            Truncation::None => t,
            Truncation::PositivePart => t.max(0.0),
        }
    }

    pub fn breakdown(&self, u: &[f64]) -> Result<EnergyBreakdown> {
        let d = self.domain;
        let k = &d.kernel;
        let cm = d.cell_measure;
        let rows = map_rows(d.len(), |i| {
            let ui = u[i];
            let mut terms = Vec::with_capacity(k.n - i + 2);
            for j in (i + 1)..k.n {
                let p = k.p(i, j);
                terms.push(k.w(i, j) * pow_abs(ui - u[j], p) / p);
            }
            terms.push(collar_sum(&k.collar[i], ui, |w, p, t| w * pow_abs(t, p) / p));
            let pd = d.nodes.p_diag[i];
            terms.push(cm * d.nodes.tail[i] * pow_abs(ui, pd) / pd);
            let a = d.nodes.alpha[i];
            let concave = pow_abs(self.concave_arg(ui), a) / a;
            let (_, big_f) = eval_frozen(&d.nodes.terms[i], ui);
            (pairwise_sum(&terms), concave, big_f)
        });
        let g: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let c: Vec<f64> = rows.iter().map(|r| r.1).collect();
        let f: Vec<f64> = rows.iter().map(|r| r.2).collect();
        let gagliardo_term = pairwise_sum(&g);
        let concave_term = self.lambda * cm * pairwise_sum(&c);
        let convex_term = cm * pairwise_sum(&f);
        let total = gagliardo_term - concave_term - convex_term;
        if !total.is_finite() {
            return Err(Error::numeric(
                "energy",
                format!("non-finite energy (G = {gagliardo_term}, C = {concave_term}, F = {convex_term})"),
            ));
        }
        Ok(EnergyBreakdown { gagliardo_term, concave_term, convex_term, total })
    }

    pub fn value(&self, u: &[f64]) -> Result<f64> {
        Ok(self.breakdown(u)?.total)
    }

    /// Euclidean gradient `g_i = |cell| [A(u)_i - λ ψ_α(u_i) - f(x_i, u_i)]`.
    pub fn gradient(&self, u: &[f64]) -> Result<Vec<f64>> {
        let d = self.domain;
        let cm = d.cell_measure;
        let g = map_rows(d.len(), |i| {
            let ui = u[i];
            let local = self.lambda * signed_pow(self.concave_arg(ui), d.nodes.alpha[i]) + eval_frozen(&d.nodes.terms[i], ui).0;
            operator_row(u, d, i) - cm * local
        });
        if let Some(i) = g.iter().position(|v| !v.is_finite()) {
            return Err(Error::numeric("energy gradient", format!("entry {i} is {}", g[i])));
        }
        Ok(g)
    }

    /// Dense Hessian; see [`curvature`] for the floor at degenerate points.
    pub fn hessian(&self, u: &[f64]) -> DMatrix<f64> {
        let d = self.domain;
        let cm = d.cell_measure;
        let mut h = gagliardo_hessian(u, d);
        for i in 0..d.len() {
            let ui = u[i];
            let a = d.nodes.alpha[i];
            let concave = match self.truncation {
                Truncation::PositivePart if ui <= 0.0 => 0.0,
                _ => self.lambda * curvature(ui, a),
            };
            h[(i, i)] -= cm * (concave + derivative_frozen(&d.nodes.terms[i], ui).min(1e300));
        }
        h
    }

    /// `⟨J'(u), w⟩` evaluated straight from the weak form: unordered pairs
    /// with `(w_i - w_j)`, independently of [`Self::gradient`].
    pub fn weak_form_pairing(&self, u: &[f64], w: &[f64]) -> f64 {
        let d = self.domain;
        let k = &d.kernel;
        let cm = d.cell_measure;
        let mut terms = Vec::new();
        for i in 0..k.n {
            for j in (i + 1)..k.n {
                terms.push(k.w(i, j) * signed_pow(u[i] - u[j], k.p(i, j)) * (w[i] - w[j]));
            }
        }
        for i in 0..k.n {
            let ui = u[i];
            let exterior =
                collar_sum(&k.collar[i], ui, |wt, p, t| wt * signed_pow(t, p)) + cm * d.nodes.tail[i] * signed_pow(ui, d.nodes.p_diag[i]);
            let rhs = self.lambda * signed_pow(self.concave_arg(ui), d.nodes.alpha[i]) + eval_frozen(&d.nodes.terms[i], ui).0;
            terms.push(exterior * w[i] - cm * rhs * w[i]);
        }
        pairwise_sum(&terms)
    }
}

/// Hessian of the Gagliardo energy term `Σ w|Δ|^p/p + tail`.
pub fn gagliardo_hessian(u: &[f64], d: &DiscreteDomain) -> DMatrix<f64> {
    let k = &d.kernel;
    let n = k.n;
    let cm = d.cell_measure;
    let mut h = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut diag = 0.0;
        for j in 0..n {
            if j != i {
                let c = k.w(i, j) * curvature(u[i] - u[j], k.p(i, j));
                h[(i, j)] = -c;
                diag += c;
            }
        }
        diag += match &k.collar[i] {
            CollarRow::Uniform { weight, exponent } => weight * curvature(u[i], *exponent),
            CollarRow::Mixed { weights, exponents } => weights.iter().zip(exponents).map(|(&w, &p)| w * curvature(u[i], p)).sum(),
        };
        diag += cm * d.nodes.tail[i] * curvature(u[i], d.nodes.p_diag[i]);
        h[(i, i)] = diag;
    }
    h
}

/// The energy of `u`.
pub fn energy(u: &GridFunction, domain: &DiscreteDomain, lambda: f64) -> Result<EnergyBreakdown> {
    EnergyFunctional::new(domain, lambda).breakdown(u.values())
}

/// The truncated energy `J_λ⁺` (concave term on `u⁺`).
pub fn energy_plus(u: &GridFunction, domain: &DiscreteDomain, lambda: f64) -> Result<EnergyBreakdown> {
    EnergyFunctional::positive_part(domain, lambda).breakdown(u.values())
}

pub fn energy_gradient(u: &GridFunction, domain: &DiscreteDomain, lambda: f64) -> Result<GridFunction> {
    EnergyFunctional::new(domain, lambda).gradient(u.values()).map(GridFunction::from_vec_unchecked)
}

pub fn energy_plus_gradient(u: &GridFunction, domain: &DiscreteDomain, lambda: f64) -> Result<GridFunction> {
    EnergyFunctional::positive_part(domain, lambda).gradient(u.values()).map(GridFunction::from_vec_unchecked)
}

/// Euclidean norm with a fixed summation order.
pub fn euclidean_norm(v: &[f64]) -> f64 {
    let sq: Vec<f64> = v.iter().map(|x| x * x).collect();
    pairwise_sum(&sq).sqrt()
}

/// Dot product with a fixed summation order.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    let p: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
    pairwise_sum(&p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{presets, SignMode};
    use crate::{build_domain, ProblemSpec};
    use proptest::prelude::*;

    /// Ordered-pair double sum over interior ∪ collar, halved, plus the tail.
    fn brute_modular(u: &[f64], spec: &ProblemSpec, d: &DiscreteDomain) -> f64 {
        let n = d.dim() as f64;
        let pts: Vec<(crate::Point, f64)> =
            d.interior.iter().zip(u).map(|(x, &v)| (*x, v)).chain(d.collar.iter().map(|x| (*x, 0.0))).collect();
        let mut total = 0.0;
        for (a, (xa, ua)) in pts.iter().enumerate() {
            for (b, (xb, ub)) in pts.iter().enumerate() {
                if a == b || (*ua == 0.0 && *ub == 0.0) {
                    continue;
                }
                let dist = ((xa[0] - xb[0]).powi(2) + (xa[1] - xb[1]).powi(2)).sqrt();
                let p = spec.p.eval(xa, xb);
                let s = spec.s.eval(xa, xb);
                total += 0.5 * d.cell_measure * d.cell_measure * (ua - ub).abs().powf(p) / dist.powf(n + s * p);
            }
        }
        for (i, &v) in u.iter().enumerate() {
            total += d.cell_measure * d.tail(i) * v.abs().powf(spec.p.diag(&d.interior[i]));
        }
        total
    }

    fn wavy(d: &DiscreteDomain) -> Vec<f64> {
        d.interior.iter().map(|x| (3.0 * x[0]).sin() + 0.4 * (7.0 * x[0] + 2.0 * x[1]).cos()).collect()
    }

    #[test]
    fn modular_matches_brute_force_double_sum() {
        for spec in [presets::variable_1d(), presets::reference_2d(SignMode::OddPower)] {
            let d = build_domain(&spec, 10, 1.0).unwrap();
            let u = wavy(&d);
            let fast = gagliardo_modular(&GridFunction::new(u.clone()).unwrap(), &d).unwrap();
            let slow = brute_modular(&u, &spec, &d);
            assert!((fast - slow).abs() <= 1e-12 * slow, "{fast} vs {slow}");
        }
    }

    #[test]
    fn x0_norm_normalizes_modular() {
        let spec = presets::variable_1d();
        let d = build_domain(&spec, 16, 1.0).unwrap();
        let u = GridFunction::new(wavy(&d)).unwrap();
        let n = x0_norm(&u, &d, 1e-13).unwrap().norm;
        let rho = gagliardo_modular(&u.scaled(1.0 / n), &d).unwrap();
        assert!((rho - 1.0).abs() < 1e-12);
        assert_eq!(x0_norm(&GridFunction::zeros(d.len()), &d, 1e-12).unwrap().norm, 0.0);
    }

    #[test]
    fn constant_exponent_norm_is_modular_root() {
        let spec = presets::reference(SignMode::OddPower);
        let d = build_domain(&spec, 16, 2.0).unwrap();
        let u = GridFunction::new(wavy(&d)).unwrap();
        let rho = gagliardo_modular(&u, &d).unwrap();
        let n = x0_norm(&u, &d, 1e-13).unwrap().norm;
        assert!((n - rho.sqrt()).abs() < 1e-14 * n);
    }

    fn central_difference(f: impl Fn(&[f64]) -> f64, u: &[f64], w: &[f64], h: f64) -> f64 {
        let plus: Vec<f64> = u.iter().zip(w).map(|(a, b)| a + h * b).collect();
        let minus: Vec<f64> = u.iter().zip(w).map(|(a, b)| a - h * b).collect();
        (f(&plus) - f(&minus)) / (2.0 * h)
    }

    #[test]
    fn operator_is_the_gradient_of_the_gagliardo_term() {
        let spec = presets::variable_1d();
        let d = build_domain(&spec, 12, 1.0).unwrap();
        let u = wavy(&d);
        let w: Vec<f64> = (0..d.len()).map(|i| ((i * 7 % 5) as f64) - 2.0).collect();
        let f = EnergyFunctional::new(&d, 0.0);
        let g = |v: &[f64]| f.breakdown(v).unwrap().gagliardo_term;
        let fd = central_difference(g, &u, &w, 1e-6);
        let a = apply_operator_slice(&u, &d);
        let exact = d.cell_measure * dot(&a, &w);
        assert!((fd - exact).abs() <= 1e-7 * (1.0 + exact.abs()), "{fd} vs {exact}");
    }

    #[test]
    fn gradient_matches_central_difference_in_both_modes() {
        let spec = presets::variable_1d();
        let d = build_domain(&spec, 12, 1.0).unwrap();
        let u = wavy(&d);
        let w: Vec<f64> = (0..d.len()).map(|i| (i as f64 * 0.37).cos()).collect();
        for f in [EnergyFunctional::new(&d, 0.3), EnergyFunctional::positive_part(&d, 0.3)] {
            let fd = central_difference(|v| f.value(v).unwrap(), &u, &w, 1e-6);
            let exact = dot(&f.gradient(&u).unwrap(), &w);
            assert!((fd - exact).abs() <= 1e-7 * (1.0 + exact.abs()), "{fd} vs {exact}");
        }
    }

    #[test]
    fn weak_form_pairing_agrees_with_gradient() {
        let spec = presets::reference_2d(SignMode::OddPower);
        let d = build_domain(&spec, 6, 1.0).unwrap();
        let u = wavy(&d);
        let w: Vec<f64> = (0..d.len()).map(|i| (i as f64).sin()).collect();
        let f = EnergyFunctional::new(&d, 0.05);
        let a = f.weak_form_pairing(&u, &w);
        let b = dot(&f.gradient(&u).unwrap(), &w);
        assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
    }

    #[test]
    fn hessian_matches_gradient_differences() {
        let spec = presets::variable_1d();
        let d = build_domain(&spec, 10, 1.0).unwrap();
        let u = wavy(&d);
        let f = EnergyFunctional::new(&d, 0.2);
        let h = f.hessian(&u);
        let eps = 1e-6;
        for j in [0, 4, 9] {
            let mut up = u.clone();
            let mut um = u.clone();
            up[j] += eps;
            um[j] -= eps;
            let gp = f.gradient(&up).unwrap();
            let gm = f.gradient(&um).unwrap();
            for i in 0..d.len() {
                let fd = (gp[i] - gm[i]) / (2.0 * eps);
                assert!((fd - h[(i, j)]).abs() <= 1e-5 * (1.0 + fd.abs()), "({i},{j}): {fd} vs {}", h[(i, j)]);
            }
        }
    }

    #[test]
    fn positive_part_energy_ignores_negative_values_in_reaction_terms() {
        let spec = presets::reference(SignMode::PositivePart);
        let d = build_domain(&spec, 8, 1.0).unwrap();
        let u = GridFunction::new(vec![-0.5; 8]).unwrap();
        let e = energy_plus(&u, &d, 0.5).unwrap();
        assert_eq!(e.concave_term, 0.0);
        assert_eq!(e.convex_term, 0.0);
        assert_eq!(e.total, e.gagliardo_term);
    }

    #[test]
    fn zero_has_zero_energy_and_gradient() {
        let spec = presets::reference(SignMode::OddPower);
        let d = build_domain(&spec, 8, 1.0).unwrap();
        let z = GridFunction::zeros(8);
        assert_eq!(energy(&z, &d, 0.05).unwrap().total, 0.0);
        assert!(energy_gradient(&z, &d, 0.05).unwrap().is_zero());
    }

    #[test]
    fn overflow_is_reported_with_pair() {
        let spec = presets::reference(SignMode::OddPower);
        let d = build_domain(&spec, 8, 1.0).unwrap();
        let mut v = vec![0.0; 8];
        v[2] = 1e200;
        let err = gagliardo_modular(&GridFunction::new(v).unwrap(), &d).unwrap_err();
        assert!(err.to_string().contains("pair (0, 2)"), "{err}");
    }

    #[test]
    fn breakdown_serializes() {
        let spec = presets::reference(SignMode::OddPower);
        let d = build_domain(&spec, 8, 1.0).unwrap();
        let e = energy(&GridFunction::new(vec![0.1; 8]).unwrap(), &d, 0.05).unwrap();
        let v = toml::Value::try_from(e).unwrap();
        assert!(v.get("gagliardo_term").is_some());
    }

    proptest! {
        #[test]
        fn modular_is_p_homogeneous_for_constant_p(vals in prop::collection::vec(-3.0f64..3.0, 8), t in 0.1f64..5.0) {
            let spec = presets::reference(SignMode::OddPower);
            let d = build_domain(&spec, 8, 1.0).unwrap();
            let u = GridFunction::new(vals).unwrap();
            let a = gagliardo_modular(&u.scaled(t), &d).unwrap();
            let b = t * t * gagliardo_modular(&u, &d).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b));
        }

        #[test]
        fn modular_is_even_and_nonnegative(vals in prop::collection::vec(-3.0f64..3.0, 10)) {
            let spec = presets::variable_1d();
            let d = build_domain(&spec, 10, 1.0).unwrap();
            let u = GridFunction::new(vals).unwrap();
            let a = gagliardo_modular(&u, &d).unwrap();
            prop_assert!(a >= 0.0);
            prop_assert_eq!(a, gagliardo_modular(&u.scaled(-1.0), &d).unwrap());
        }

        #[test]
        fn norm_is_absolutely_homogeneous(vals in prop::collection::vec(-3.0f64..3.0, 10), t in -4.0f64..4.0) {
            prop_assume!(t.abs() > 1e-3);
            let spec = presets::variable_1d();
            let d = build_domain(&spec, 10, 1.0).unwrap();
            let u = GridFunction::new(vals).unwrap();
            prop_assume!(!u.is_zero());
            let a = x0_norm(&u.scaled(t), &d, 1e-13).unwrap().norm;
            let b = t.abs() * x0_norm(&u, &d, 1e-13).unwrap().norm;
            prop_assert!((a - b).abs() <= 1e-10 * b);
        }
    }
}
