//! Fixtures shared by the kernel benchmarks.

use vexfrac::{build_domain, presets, DiscreteDomain, GridFunction, SignMode};

/// The reference problem on `cells` nodes per axis with a collar factor of 2.
pub fn reference_domain(cells: usize) -> DiscreteDomain {
    build_domain(&presets::reference(SignMode::OddPower), cells, 2.0).expect("reference problem builds")
}

/// The 2D analogue on a `cells × cells` grid.
pub fn square_domain(cells: usize) -> DiscreteDomain {
    build_domain(&presets::reference_2d(SignMode::OddPower), cells, 1.0).expect("2D reference problem builds")
}

/// `x ↦ sin(πx₁)·…` sampled on the nodes; smooth, positive, zero at ∂Ω.
pub fn smooth_state(d: &DiscreteDomain) -> GridFunction {
    let dim = d.dim();
    d.sample(|x| x[..dim].iter().map(|t| (std::f64::consts::PI * t).sin()).product())
}
