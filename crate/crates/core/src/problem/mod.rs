//! Analytic problem data and hypothesis validation.

pub mod expr;
mod field;
pub mod file;
mod hypotheses;
mod nonlinearity;
mod spec;

pub use field::{PairField, PointField};
pub use hypotheses::{
    halton, pair_samples, point_samples, require_multiplicity, validate_hypotheses, ExponentBounds, HypothesisCheck, HypothesisReport,
};
pub use nonlinearity::{derivative_frozen, eval_frozen, FrozenTerm, Nonlinearity, PowerTerm, SignMode};
pub use spec::{presets, BoxRegion, ProblemSpec};

/// `(f(x,t), F(x,t))` for the problem's nonlinearity.
pub fn evaluate_nonlinearity(spec: &ProblemSpec, x: &crate::Point, t: f64) -> (f64, f64) {
    spec.nonlinearity.eval(x, t)
}

/// `p_s*(x)`; see [`ProblemSpec::critical_exponent`].
pub fn critical_exponent(spec: &ProblemSpec, x: &crate::Point) -> crate::Result<f64> {
    spec.critical_exponent(x)
}
