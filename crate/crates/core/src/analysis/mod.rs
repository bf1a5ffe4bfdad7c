//! Numerical verification of the inequalities behind the existence and
//! regularity theory, the embedding-constant estimate, and the L∞
//! bootstrap ladder on computed solutions.

mod bootstrap;
mod embedding;
mod inequalities;

use serde::Serialize;

pub use bootstrap::{bootstrap_linf, lq_norm, BootstrapConfig, BootstrapReport};
pub use embedding::{estimate_embedding_constant, EmbeddingEstimate, ASCENT_STEPS};
pub use inequalities::{
    check_norm_modular_interplay, check_power_comparison, check_simon, check_truncation_inequality, norm_modular_suite,
    power_comparison_suite, simon_suite, truncation_suite,
};

/// Relative slack `margin ≥ -REL_SLACK (|lhs| + |rhs|)` for counting a
/// sample as satisfied; absorbs rounding in the two sides.
pub const REL_SLACK: f64 = 1e-12;

/// Outcome of a sampled inequality run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub name: String,
    pub samples: usize,
    pub violations: usize,
    /// Smallest `(rhs - lhs) / (|lhs| + |rhs|)` seen (0 when both sides vanish).
    pub worst_margin: f64,
    /// Inputs at the worst margin.
    pub witness: Option<Vec<f64>>,
}

impl InequalityReport {
    pub(crate) fn new(name: &str) -> Self {
        InequalityReport { name: name.to_string(), samples: 0, violations: 0, worst_margin: f64::INFINITY, witness: None }
    }

    /// Records one sample with sides `lhs ≤ rhs`.
    pub(crate) fn record(&mut self, lhs: f64, rhs: f64, inputs: &[f64]) {
        self.samples += 1;
        let scale = lhs.abs() + rhs.abs();
        let rel = if scale > 0.0 { (rhs - lhs) / scale } else { 0.0 };
        let violated = !(rhs - lhs >= -REL_SLACK * scale);
        if violated {
            self.violations += 1;
        }
        if rel < self.worst_margin || (rel.is_nan() && self.witness.is_none()) {
            self.worst_margin = rel;
            self.witness = Some(inputs.to_vec());
        }
    }

    pub(crate) fn merge(&mut self, other: InequalityReport) {
        self.samples += other.samples;
        self.violations += other.violations;
        if other.worst_margin < self.worst_margin {
            self.worst_margin = other.worst_margin;
            self.witness = other.witness;
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0 && self.samples > 0
    }
}
