//! Sample-based certification of the standing hypotheses.
//!
//! Pair fields are probed on all corner pairs of Ω̄ followed by a Halton
//! sequence in Ω̄ × Ω̄; point fields on the corners followed by a Halton
//! sequence in Ω̄. The sequence is fixed, so reports are reproducible.

use serde::Serialize;

use super::nonlinearity::eval_frozen;
use super::spec::ProblemSpec;
use crate::{Error, Point, Result};

const PRIMES: [u32; 4] = [2, 3, 5, 7];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as u64;
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while i > 0 {
        out += (i % b) as f64 * inv;
        i /= b;
        inv /= base as f64;
    }
    out
}

/// `count` Halton points in `[0,1]^dims`, skipping the origin.
pub fn halton(count: usize, dims: usize) -> Vec<[f64; 4]> {
    (1..=count as u64)
        .map(|i| {
            let mut v = [0.0; 4];
            for (d, vd) in v.iter_mut().enumerate().take(dims) {
                *vd = radical_inverse(i, PRIMES[d]);
            }
            v
        })
        .collect()
}

/// Deterministic sample points in Ω̄.
pub fn point_samples(spec: &ProblemSpec, count: usize) -> Vec<Point> {
    let dim = spec.dimension();
    let mut pts = spec.omega.corners();
    pts.extend(halton(count, dim).iter().map(|h| spec.omega.from_unit(&[h[0], h[1]])));
    pts
}

/// Deterministic sample pairs in Ω̄ × Ω̄.
pub fn pair_samples(spec: &ProblemSpec, count: usize) -> Vec<(Point, Point)> {
    let dim = spec.dimension();
    let corners = spec.omega.corners();
    let mut out = Vec::new();
    for a in &corners {
        for b in &corners {
            out.push((*a, *b));
        }
    }
    for h in halton(count, 2 * dim) {
        let (u, v) = if dim == 1 { ([h[0], 0.0], [h[1], 0.0]) } else { ([h[0], h[1]], [h[2], h[3]]) };
        out.push((spec.omega.from_unit(&u), spec.omega.from_unit(&v)));
    }
    out
}

/// Outcome for one hypothesis.
#[derive(Debug, Clone, Serialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub passed: bool,
    /// Worst-case slack; negative when the hypothesis fails.
    pub margin: f64,
    /// Coordinates of the worst sample (x, then y for pair fields).
    pub witness: Option<Vec<f64>>,
    pub detail: String,
}

/// Extremes of the problem data used by the checks.
#[derive(Debug, Clone, Serialize)]
pub struct ExponentBounds {
    pub s_min: f64,
    pub s_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub r_min: f64,
    pub r_max: f64,
    /// Infimum of `p_s*` over the samples.
    pub critical_min: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct HypothesisReport {
    pub sample_count: usize,
    pub checks: Vec<HypothesisCheck>,
    pub bounds: ExponentBounds,
    /// (S1)(S2)(P1)(P2) and `s p < n`.
    pub admissible: bool,
    pub multiplicity_eligible: bool,
    pub regularity_eligible: bool,
}

impl HypothesisReport {
    pub fn get(&self, name: &str) -> Option<&HypothesisCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn passed(&self, name: &str) -> bool {
        self.get(name).is_some_and(|c| c.passed)
    }
}

fn flat(points: &[&Point], dim: usize) -> Vec<f64> {
    points.iter().flat_map(|p| p[..dim].iter().copied()).collect()
}

/// Tracks the minimum margin and where it occurred.
struct Worst {
    margin: f64,
    witness: Option<Vec<f64>>,
}

impl Worst {
    fn new() -> Self {
        Worst { margin: f64::INFINITY, witness: None }
    }

    fn offer(&mut self, margin: f64, witness: impl FnOnce() -> Vec<f64>) {
        if margin < self.margin {
            self.margin = margin;
            self.witness = Some(witness());
        }
    }

    fn check(self, name: &str, passed: bool, detail: String) -> HypothesisCheck {
        HypothesisCheck { name: name.to_string(), passed, margin: self.margin, witness: self.witness, detail }
    }
}

fn finite(field: &str, value: f64, at: &[Point]) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::evaluator(field, value, at))
    }
}

fn within_declared(field: &str, value: f64, min: f64, max: f64, at: &[Point]) -> Result<()> {
    let slack = 1e-12 * (1.0 + min.abs().max(max.abs()));
    if value < min - slack || value > max + slack {
        return Err(Error::DeclaredBound {
            field: field.to_string(),
            min,
            max,
            value,
            witness: at.iter().flat_map(|p| p.iter().copied()).collect(),
        });
    }
    Ok(())
}

/// Validates every standing hypothesis on `sample_count` Halton samples
/// (plus the corners of Ω̄).
pub fn validate_hypotheses(spec: &ProblemSpec, sample_count: usize) -> Result<HypothesisReport> {
    let dim = spec.dimension();
    let n = dim as f64;
    let pairs = pair_samples(spec, sample_count);
    let points = point_samples(spec, sample_count);

    // Pair fields: evaluability, declared ranges, symmetry, s p < n.
    let mut sym_s = Worst::new();
    let mut sym_p = Worst::new();
    let mut sp = Worst::new();
    for (x, y) in &pairs {
        let at = [*x, *y];
        let sxy = finite(spec.s.name(), spec.s.eval(x, y), &at)?;
        let syx = finite(spec.s.name(), spec.s.eval(y, x), &at)?;
        let pxy = finite(spec.p.name(), spec.p.eval(x, y), &at)?;
        let pyx = finite(spec.p.name(), spec.p.eval(y, x), &at)?;
        within_declared(spec.s.name(), sxy, spec.s.declared_min(), spec.s.declared_max(), &at)?;
        within_declared(spec.p.name(), pxy, spec.p.declared_min(), spec.p.declared_max(), &at)?;
        sym_s.offer(-(sxy - syx), || flat(&[x, y], dim));
        sym_p.offer(-(pxy - pyx), || flat(&[x, y], dim));
        sp.offer(n - sxy * pxy, || flat(&[x, y], dim));
    }

    let (s_min, s_max) = (spec.s.declared_min(), spec.s.declared_max());
    let (p_min, p_max) = (spec.p.declared_min(), spec.p.declared_max());
    let (a_min, a_max) = (spec.alpha.declared_min(), spec.alpha.declared_max());
    let (r_min, r_max) = (spec.r.declared_min(), spec.r.declared_max());

    let sym_tol = 1e-12;
    let mut checks = Vec::new();
    let m = sym_s.margin;
    checks.push(sym_s.check("S1", m >= -sym_tol, "s(x,y) = s(y,x)".into()));
    checks.push(HypothesisCheck {
        name: "S2".into(),
        passed: s_min > 0.0 && s_max < 1.0,
        margin: s_min.min(1.0 - s_max),
        witness: None,
        detail: format!("0 < s- = {s_min} <= s+ = {s_max} < 1"),
    });
    let m = sym_p.margin;
    checks.push(sym_p.check("P1", m >= -sym_tol, "p(x,y) = p(y,x)".into()));
    checks.push(HypothesisCheck {
        name: "P2".into(),
        passed: p_min > 1.0 && p_max.is_finite(),
        margin: p_min - 1.0,
        witness: None,
        detail: format!("1 < p- = {p_min} <= p+ = {p_max} < inf"),
    });
    let m = sp.margin;
    checks.push(sp.check("SP", m > 0.0, format!("s(x,y) p(x,y) < n = {dim}")));

    // Point fields.
    let mut critical = Worst::new();
    let mut r_sub = Worst::new();
    let mut term_exp = Worst::new();
    let mut growth = Worst::new();
    let mut f2 = Worst::new();
    let mut f3 = Worst::new();
    let mut a2 = Worst::new();
    let nl = &spec.nonlinearity;
    let positive = nl.is_positive_part();
    let ar_ts: Vec<f64> = (0..24).map(|k| nl.ar_a * (1.0 + 1e-9) * 1.5f64.powi(k)).collect();
    for x in &points {
        let at = [*x];
        let q = finite(spec.p.name(), spec.q(x), &at)?;
        let alpha = finite(spec.alpha.name(), spec.alpha.eval(x), &at)?;
        let r = finite(spec.r.name(), spec.r.eval(x), &at)?;
        within_declared(spec.alpha.name(), alpha, a_min, a_max, &at)?;
        within_declared(spec.r.name(), r, r_min, r_max, &at)?;
        let s_diag = spec.s.diag(x);
        let crit = if n - s_diag * q > 0.0 { n * q / (n - s_diag * q) } else { f64::INFINITY };
        critical.offer(crit, || flat(&[x], dim));
        r_sub.offer(crit - r, || flat(&[x], dim));
        a2.offer(q - alpha, || flat(&[x], dim));

        let frozen = nl.freeze(x);
        let mut abs_sum = 0.0;
        for (term, src) in frozen.iter().zip(&nl.terms) {
            finite(src.coefficient.name(), term.coefficient, &at)?;
            finite(src.exponent.name(), term.exponent, &at)?;
            abs_sum += term.coefficient.abs();
            if term.coefficient != 0.0 {
                term_exp.offer(-(term.exponent - r).abs(), || flat(&[x], dim));
            }
        }
        growth.offer(nl.growth_bound - abs_sum, || flat(&[x], dim));

        for k in 1..=16 {
            let t = nl.t_star * k as f64 / 16.0;
            let (f, _) = eval_frozen(&frozen, t);
            f2.offer(f, || flat(&[x], dim).into_iter().chain([t]).collect());
        }
        for &t in &ar_ts {
            let signs: &[f64] = if positive { &[1.0] } else { &[1.0, -1.0] };
            for sgn in signs {
                let tt = sgn * t;
                let (f, big_f) = eval_frozen(&frozen, tt);
                let tf = tt * f;
                let bf = nl.ar_b * big_f;
                let scale = tf.abs().max(bf.abs()).max(f64::MIN_POSITIVE);
                // bF > 0 and tf - bF >= 0, both relative to the size of tf.
                let margin = (bf / scale).min((tf - bf) / scale + 1e-12);
                f3.offer(margin, || flat(&[x], dim).into_iter().chain([tt]).collect());
            }
        }
    }
    let critical_min = critical.margin;

    let r_ok = r_min > 1.0 && r_max.is_finite();
    let m_sub = r_sub.margin;
    let m_exp = term_exp.margin;
    let m_growth = growth.margin;
    let f1_margin = m_sub.min(m_growth).min(if m_exp.is_finite() { m_exp + 1e-12 } else { f64::INFINITY }).min(r_min - 1.0);
    let f1_witness = if m_sub <= m_growth { r_sub.witness.clone() } else { growth.witness.clone() };
    checks.push(HypothesisCheck {
        name: "F1".into(),
        passed: r_ok && m_sub > 0.0 && m_growth >= 0.0 && m_exp >= -1e-12,
        margin: f1_margin,
        witness: f1_witness,
        detail: format!(
            "|f| <= M|t|^(r-1): r in C+, r < p_s* (slack {m_sub:.6}), term exponents equal r (slack {m_exp:.3e}), M - sum|c| = {m_growth:.6}"
        ),
    });
    let m = f2.margin;
    checks.push(f2.check("F2", m >= 0.0, format!("f(x,t) >= 0 on [0, {}]", nl.t_star)));
    let m = f3.margin;
    let b_ok = nl.ar_b > p_max;
    checks.push(HypothesisCheck {
        name: "F3".into(),
        passed: nl.ar_a > 0.0 && b_ok && m > 0.0,
        margin: if b_ok { m } else { nl.ar_b - p_max },
        witness: f3.witness,
        detail: format!("0 < bF <= tf for {}t > a = {} with b = {} > p+ = {p_max}", if positive { "" } else { "|" }, nl.ar_a, nl.ar_b),
    });
    checks.push(HypothesisCheck {
        name: "A1".into(),
        passed: a_min > 1.0 && a_max < p_min,
        margin: (p_min - a_max).min(a_min - 1.0),
        witness: None,
        detail: format!("1 < alpha- = {a_min}, alpha+ = {a_max} < p- = {p_min}"),
    });
    let m = a2.margin;
    checks.push(a2.check("A2", m >= 0.0, "alpha(x) <= p(x,x)".into()));
    checks.push(HypothesisCheck {
        name: "SUPERLINEAR".into(),
        passed: p_max < r_min,
        margin: r_min - p_max,
        witness: None,
        detail: format!("p+ = {p_max} < r- = {r_min}"),
    });
    checks.push(HypothesisCheck {
        name: "REGULARITY".into(),
        passed: p_max <= r_max && r_max < critical_min,
        margin: (r_max - p_max).min(critical_min - r_max),
        witness: None,
        detail: format!("p+ = {p_max} <= r+ = {r_max} < inf p_s* = {critical_min}"),
    });

    let pass = |name: &str| checks.iter().any(|c| c.name == name && c.passed);
    let admissible = ["S1", "S2", "P1", "P2", "SP"].iter().all(|h| pass(h));
    let multiplicity_eligible = admissible && ["F1", "F2", "F3", "A1", "SUPERLINEAR"].iter().all(|h| pass(h));
    let regularity_eligible = multiplicity_eligible && pass("REGULARITY") && pass("A2");

    Ok(HypothesisReport {
        sample_count: pairs.len().max(points.len()),
        checks,
        bounds: ExponentBounds { s_min, s_max, p_min, p_max, alpha_min: a_min, alpha_max: a_max, r_min, r_max, critical_min },
        admissible,
        multiplicity_eligible,
        regularity_eligible,
    })
}

/// Fails unless the spec passes the hypotheses needed by the two-solution solvers.
pub fn require_multiplicity(spec: &ProblemSpec) -> Result<HypothesisReport> {
    let report = validate_hypotheses(spec, 256)?;
    if !report.multiplicity_eligible {
        let failed: Vec<&str> =
            report.checks.iter().filter(|c| !c.passed && c.name != "A2" && c.name != "REGULARITY").map(|c| c.name.as_str()).collect();
        return Err(Error::Config(format!("problem is not multiplicity-eligible; failing: {failed:?}")));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{presets, PairField, PointField, SignMode};

    #[test]
    fn reference_is_multiplicity_and_regularity_eligible() {
        let spec = presets::reference(SignMode::OddPower);
        let rep = validate_hypotheses(&spec, 128).unwrap();
        for c in &rep.checks {
            assert!(c.passed, "{c:?}");
        }
        assert!(rep.multiplicity_eligible && rep.regularity_eligible);
        assert!((rep.get("SP").unwrap().margin - 0.2).abs() < 1e-12);
        assert!((rep.bounds.critical_min - 10.0).abs() < 1e-12);
        let b = &rep.bounds;
        assert!(b.alpha_max < b.p_min && b.p_min <= b.p_max && b.p_max < b.r_min);
    }

    #[test]
    fn asymmetric_order_is_caught_with_corner_witness() {
        let mut spec = presets::reference(SignMode::OddPower);
        spec.s = PairField::unsymmetrized("s", |x, y| 0.4 + 0.1 * (x[0] - y[0]), 0.3, 0.5);
        let rep = validate_hypotheses(&spec, 64).unwrap();
        let s1 = rep.get("S1").unwrap();
        assert!(!s1.passed);
        assert_eq!(s1.witness.as_deref(), Some(&[1.0, 0.0][..]));
        assert!(!rep.admissible && !rep.multiplicity_eligible);
    }

    #[test]
    fn boundary_case_sp_equal_n_is_rejected() {
        let mut spec = presets::reference(SignMode::OddPower);
        spec.s = PairField::constant("s", 0.5);
        let rep = validate_hypotheses(&spec, 16).unwrap();
        assert!(!rep.passed("SP"));
        assert!(!rep.admissible);
    }

    #[test]
    fn declared_bound_violation_is_hard_error() {
        let mut spec = presets::reference(SignMode::OddPower);
        spec.alpha = PointField::from_fn("alpha", |x| 1.5 + x[0], 1.4, 1.6);
        assert!(matches!(validate_hypotheses(&spec, 16), Err(Error::DeclaredBound { .. })));
    }

    #[test]
    fn nan_evaluator_reports_witness() {
        let mut spec = presets::reference(SignMode::OddPower);
        spec.r = PointField::from_fn("r", |x| if x[0] > 0.9 { f64::NAN } else { 3.5 }, 3.5, 3.5);
        match validate_hypotheses(&spec, 16) {
            Err(Error::Evaluator { field, witness, .. }) => {
                assert_eq!(field, "r");
                assert!(witness[0] > 0.9);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn weak_ar_constant_fails_f3() {
        let mut spec = presets::reference(SignMode::OddPower);
        spec.nonlinearity.ar_b = 3.6;
        assert!(!validate_hypotheses(&spec, 16).unwrap().passed("F3"));
        spec.nonlinearity.ar_b = 1.9;
        assert!(!validate_hypotheses(&spec, 16).unwrap().passed("F3"));
    }

    #[test]
    fn concave_exponent_above_p_fails_a1() {
        let mut spec = presets::reference(SignMode::OddPower);
        spec.alpha = PointField::constant("alpha", 2.2);
        let rep = validate_hypotheses(&spec, 16).unwrap();
        assert!(!rep.passed("A1") && !rep.passed("A2"));
        assert!(!rep.multiplicity_eligible);
    }

    #[test]
    fn halton_points_are_in_unit_cube_and_distinct() {
        let h = halton(100, 3);
        assert!(h.iter().all(|p| p[..3].iter().all(|v| (0.0..1.0).contains(v))));
        assert_ne!(h[0], h[1]);
        assert_eq!(h[0][0], 0.5);
    }
}
