//! Critical points of the energy: the negative-energy local minimizer, the
//! mountain-pass saddle, the λ sweep, the nonnegative variant, and the
//! constrained eigenpair.

mod descent;
mod eigen;
mod local_min;
mod mountain_pass;
mod sweep;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{DiscreteDomain, GridFunction};
use crate::nonlocal::{euclidean_norm, EnergyFunctional};
use crate::problem::ProblemSpec;
use crate::{Error, Result};

pub use eigen::{solve_eigenproblem, EigenSolution, EIGEN_NORMALIZATION};
pub use local_min::{barrier_scan, find_local_min, BarrierScan};
pub use mountain_pass::mountain_pass;
pub use sweep::{distinct, lambda_sweep, SweepReport, SweepRow};

/// Named initial shapes on the unit box, scaled to Ω.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileShape {
    /// `Π 4t(1-t)` in unit coordinates.
    Parabola,
    /// `exp(1 - 1/(1 - r²))` around the center, `r` the normalized distance.
    Bump,
    /// `Π (1 - |2t - 1|)`.
    Tent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub shape: ProfileShape,
    pub amplitude: f64,
}

impl Profile {
    pub fn new(shape: ProfileShape, amplitude: f64) -> Self {
        Profile { shape, amplitude }
    }

    pub fn sample(&self, domain: &DiscreteDomain) -> GridFunction {
        let dim = domain.dim();
        let omega = &domain.omega;
        domain.sample(|x| {
            let t: Vec<f64> = (0..dim).map(|k| (x[k] - omega.lo[k]) / omega.side(k)).collect();
            let v = match self.shape {
                ProfileShape::Parabola => t.iter().map(|&t| 4.0 * t * (1.0 - t)).product(),
                ProfileShape::Tent => t.iter().map(|&t| 1.0 - (2.0 * t - 1.0).abs()).product(),
                ProfileShape::Bump => {
                    let r2: f64 = t.iter().map(|&t| (2.0 * t - 1.0).powi(2)).sum();
                    if r2 < 1.0 {
                        (1.0 - 1.0 / (1.0 - r2)).exp()
                    } else {
                        0.0
                    }
                }
            };
            self.amplitude * v
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub max_iters: usize,
    pub grad_tol: f64,
    pub armijo_c: f64,
    pub backtrack: f64,
    /// Search radius δ of the local minimizer; `None` runs the barrier scan.
    pub ball_radius: Option<f64>,
    pub path_points: usize,
    pub seed: u64,
    /// Mountain-pass direction ξ.
    pub xi: Profile,
    /// Local-minimizer direction φ.
    pub phi: Profile,
    /// Finish each descent with Newton iterations on the gradient.
    pub newton_polish: bool,
    /// Random restarts of the eigen-solver after a collapse to zero.
    pub restarts: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iters: 20_000,
            grad_tol: 1e-10,
            armijo_c: 1e-4,
            backtrack: 0.5,
            ball_radius: None,
            path_points: 16,
            seed: 0,
            xi: Profile::new(ProfileShape::Parabola, 1.0),
            phi: Profile::new(ProfileShape::Parabola, 1.0),
            newton_polish: true,
            restarts: 3,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.grad_tol > 0.0) {
            return bad(format!("grad_tol must be positive, got {}", self.grad_tol));
        }
        if !(self.armijo_c > 0.0 && self.armijo_c < 1.0) {
            return bad(format!("armijo_c must lie in (0, 1), got {}", self.armijo_c));
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return bad(format!("backtrack must lie in (0, 1), got {}", self.backtrack));
        }
        if let Some(d) = self.ball_radius {
            if !(d > 0.0 && d <= 1.0) {
                return bad(format!("ball_radius must lie in (0, 1], got {d}"));
            }
        }
        if self.path_points < 8 {
            return bad(format!("path_points must be at least 8, got {}", self.path_points));
        }
        if self.max_iters == 0 {
            return bad("max_iters must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionKind {
    MountainPass,
    LocalMin,
    Eigenfunction,
}

/// A computed critical point with its diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub u: GridFunction,
    pub energy: f64,
    /// Euclidean norm of the energy gradient (for eigenfunctions, of the
    /// constrained residual).
    pub grad_norm: f64,
    pub kind: SolutionKind,
    pub iterations: usize,
    pub converged: bool,
    pub linf_norm: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ball_radius: Option<f64>,
    /// Smallest sampled energy on the sphere `‖u‖ = δ`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub barrier_estimate: Option<f64>,
    /// The `T` with `J(Tξ) < 0` used as the path endpoint.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path_endpoint: Option<f64>,
}

impl Solution {
    pub(crate) fn from_point(f: &EnergyFunctional, u: Vec<f64>, kind: SolutionKind, iterations: usize, tol: f64) -> Result<Self> {
        let energy = f.value(&u)?;
        let grad_norm = euclidean_norm(&f.gradient(&u)?);
        let u = GridFunction::new(u)?;
        Ok(Solution {
            linf_norm: u.linf(),
            u,
            energy,
            grad_norm,
            kind,
            iterations,
            converged: grad_norm <= tol,
            ball_radius: None,
            barrier_estimate: None,
            path_endpoint: None,
        })
    }
}

/// Result of re-testing the weak formulation on random directions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakFormCheck {
    pub directions: usize,
    /// `max |⟨J'(u), w⟩| / ‖w‖` over the directions.
    pub worst_ratio: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Checks `|⟨J'(u), w⟩| ≤ tol ‖w‖` for seeded random `w`, evaluating the
/// pairing from the weak form rather than from the assembled gradient.
pub fn weak_form_recheck(f: &EnergyFunctional, u: &GridFunction, directions: usize, seed: u64, tol: f64) -> WeakFormCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..directions {
        let w: Vec<f64> = (0..u.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let ratio = f.weak_form_pairing(u.values(), &w).abs() / euclidean_norm(&w);
        worst = worst.max(ratio);
    }
    WeakFormCheck { directions, worst_ratio: worst, tolerance: tol, passed: worst <= tol }
}

/// Both nonnegative solutions of the truncated problem.
///
/// `spec` must be in positive-part mode and `domain` built from it.
pub fn solve_nonnegative(spec: &ProblemSpec, domain: &DiscreteDomain, lambda: f64, config: &SolverConfig) -> Result<(Solution, Solution)> {
    if !spec.nonlinearity.is_positive_part() {
        return Err(Error::Config("nonnegative solutions need the nonlinearity in positive-part mode".into()));
    }
    config.validate()?;
    let f = EnergyFunctional::positive_part(domain, lambda);
    let trivial = lambda == 0.0 && spec.nonlinearity.terms.iter().all(|t| t.coefficient.constant_value() == Some(0.0));
    if trivial {
        let zero = vec![0.0; domain.len()];
        let mp = Solution::from_point(&f, zero.clone(), SolutionKind::MountainPass, 0, config.grad_tol)?;
        let lm = Solution::from_point(&f, zero, SolutionKind::LocalMin, 0, config.grad_tol)?;
        return Ok((mp, lm));
    }
    let lm = local_min::run(&f, config)?;
    let mp = mountain_pass::run(&f, config)?;
    Ok((mp, lm))
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::Config(format!("lambda must be a finite nonnegative number, got {lambda}")));
    }
    Ok(())
}

pub(crate) fn axpy(u: &[f64], t: f64, d: &[f64]) -> Vec<f64> {
    u.iter().zip(d).map(|(a, b)| a + t * b).collect()
}

pub(crate) fn linf_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}
