use serde::{Deserialize, Serialize};

use super::field::PointField;
use crate::Point;

/// How a power term treats negative arguments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignMode {
    /// `c(x) |t|^{rho(x)-2} t`.
    OddPower,
    /// `c(x) (t+)^{rho(x)-1}`, zero for `t <= 0`.
    PositivePart,
}

/// One signed power term `c(x) * psi_rho(t)`.
#[derive(Debug, Clone)]
pub struct PowerTerm {
    pub coefficient: PointField,
    pub exponent: PointField,
    pub mode: SignMode,
}

/// Term values frozen at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrozenTerm {
    pub coefficient: f64,
    pub exponent: f64,
    pub mode: SignMode,
}

impl FrozenTerm {
    /// `(f, F)` for this term.
    #[inline]
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let rho = self.exponent;
        match self.mode {
            SignMode::PositivePart if t <= 0.0 => (0.0, 0.0),
            _ => {
                let a = t.abs();
                if a == 0.0 {
                    return (0.0, 0.0);
                }
                let big = a.powf(rho);
                (self.coefficient * big / t, self.coefficient * big / rho)
            }
        }
    }

    /// `d f / d t`.
    #[inline]
    pub fn derivative(&self, t: f64) -> f64 {
        let rho = self.exponent;
        match self.mode {
            SignMode::PositivePart if t <= 0.0 => 0.0,
            _ => {
                let a = t.abs();
                if a == 0.0 {
                    if rho > 2.0 {
                        return 0.0;
                    }
                    return if rho == 2.0 { self.coefficient } else { f64::INFINITY };
                }
                self.coefficient * (rho - 1.0) * a.powf(rho - 2.0)
            }
        }
    }
}

/// The nonlinearity `f(x,t)` as a finite sum of power terms, together with
/// the constants that certify its growth and Ambrosetti-Rabinowitz bounds.
#[derive(Debug, Clone)]
pub struct Nonlinearity {
    pub terms: Vec<PowerTerm>,
    /// `M` in `|f(x,t)| <= M |t|^{r(x)-1}`.
    pub growth_bound: f64,
    /// `a` in `0 < b F(x,t) <= t f(x,t)` for `|t| > a`.
    pub ar_a: f64,
    /// `b` in the same inequality.
    pub ar_b: f64,
    /// `t*` with `f(x,t) >= 0` on `[0, t*]`.
    pub t_star: f64,
}

impl Nonlinearity {
    /// The zero nonlinearity.
    pub fn zero() -> Self {
        Nonlinearity { terms: Vec::new(), growth_bound: 1.0, ar_a: 1.0, ar_b: f64::INFINITY, t_star: 1.0 }
    }

    /// A single term `c |t|^{rho-2} t` with constant data; AR holds with `b = rho`.
    pub fn single_power(coefficient: f64, exponent: f64, mode: SignMode) -> Self {
        Nonlinearity {
            terms: vec![PowerTerm {
                coefficient: PointField::constant("c", coefficient),
                exponent: PointField::constant("rho", exponent),
                mode,
            }],
            growth_bound: coefficient.abs(),
            ar_a: 1.0,
            ar_b: exponent,
            t_star: 1.0,
        }
    }

    pub fn freeze(&self, x: &Point) -> Vec<FrozenTerm> {
        self.terms.iter().map(|t| FrozenTerm { coefficient: t.coefficient.eval(x), exponent: t.exponent.eval(x), mode: t.mode }).collect()
    }

    /// `(f(x,t), F(x,t))`.
    pub fn eval(&self, x: &Point, t: f64) -> (f64, f64) {
        eval_frozen(&self.freeze(x), t)
    }

    /// True when every term truncates at zero.
    pub fn is_positive_part(&self) -> bool {
        self.terms.iter().all(|t| t.mode == SignMode::PositivePart)
    }

    /// Copy of `self` with every term switched to `mode`.
    pub fn with_mode(&self, mode: SignMode) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.mode = mode;
        }
        out
    }
}

/// Sums frozen terms into `(f, F)`.
#[inline]
pub fn eval_frozen(terms: &[FrozenTerm], t: f64) -> (f64, f64) {
    let mut f = 0.0;
    let mut big_f = 0.0;
    for term in terms {
        let (a, b) = term.eval(t);
        f += a;
        big_f += b;
    }
    (f, big_f)
}

#[inline]
pub fn derivative_frozen(terms: &[FrozenTerm], t: f64) -> f64 {
    terms.iter().map(|term| term.derivative(t)).sum()
}
