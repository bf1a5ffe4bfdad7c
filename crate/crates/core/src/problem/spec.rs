use serde::{Deserialize, Serialize};

use super::field::{PairField, PointField};
use super::nonlinearity::{Nonlinearity, SignMode};
use crate::{Error, Point, Result};

/// An axis-aligned open box `Π (lo_k, hi_k)` in dimension 1 or 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxRegion {
    pub dim: usize,
    pub lo: [f64; 2],
    pub hi: [f64; 2],
}

impl BoxRegion {
    pub fn new(lo: &[f64], hi: &[f64]) -> Result<Self> {
        let dim = lo.len();
        if !(1..=2).contains(&dim) || hi.len() != dim {
            return Err(Error::Config(format!("box must have 1 or 2 axes with matching bounds, got {} and {}", lo.len(), hi.len())));
        }
        let mut b = BoxRegion { dim, lo: [0.0; 2], hi: [0.0; 2] };
        for k in 0..dim {
            if !(lo[k].is_finite() && hi[k].is_finite() && lo[k] < hi[k]) {
                return Err(Error::Config(format!("axis {k}: need lo < hi, got [{}, {}]", lo[k], hi[k])));
            }
            b.lo[k] = lo[k];
            b.hi[k] = hi[k];
        }
        Ok(b)
    }

    pub fn unit(dim: usize) -> Self {
        BoxRegion { dim, lo: [0.0; 2], hi: [if dim >= 1 { 1.0 } else { 0.0 }, if dim == 2 { 1.0 } else { 0.0 }] }
    }

    pub fn side(&self, k: usize) -> f64 {
        self.hi[k] - self.lo[k]
    }

    pub fn measure(&self) -> f64 {
        (0..self.dim).map(|k| self.side(k)).product()
    }

    pub fn diameter(&self) -> f64 {
        (0..self.dim).map(|k| self.side(k).powi(2)).sum::<f64>().sqrt()
    }

    pub fn center(&self) -> Point {
        let mut c = [0.0; 2];
        for (k, ck) in c.iter_mut().enumerate().take(self.dim) {
            *ck = 0.5 * (self.lo[k] + self.hi[k]);
        }
        c
    }

    /// Open-box membership.
    pub fn contains(&self, x: &Point) -> bool {
        (0..self.dim).all(|k| x[k] > self.lo[k] && x[k] < self.hi[k])
    }

    /// Euclidean distance from `x` to the closed box (0 inside).
    pub fn distance_outside(&self, x: &Point) -> f64 {
        (0..self.dim)
            .map(|k| {
                let d = (self.lo[k] - x[k]).max(x[k] - self.hi[k]).max(0.0);
                d * d
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Distance from an interior `x` to the boundary of the box.
    pub fn distance_to_boundary(&self, x: &Point) -> f64 {
        (0..self.dim).map(|k| (x[k] - self.lo[k]).min(self.hi[k] - x[k])).fold(f64::INFINITY, f64::min)
    }

    /// Maps unit-cube coordinates into the box.
    pub fn from_unit(&self, t: &Point) -> Point {
        let mut x = [0.0; 2];
        for k in 0..self.dim {
            x[k] = self.lo[k] + t[k] * self.side(k);
        }
        x
    }

    pub fn corners(&self) -> Vec<Point> {
        let mut out = Vec::with_capacity(1 << self.dim);
        for mask in 0..(1usize << self.dim) {
            let mut c = [0.0; 2];
            for k in 0..self.dim {
                c[k] = if mask & (1 << k) == 0 { self.lo[k] } else { self.hi[k] };
            }
            out.push(c);
        }
        out
    }
}

/// The full analytic problem
/// `(-Δ)_{p(·)}^{s(·)} u = λ|u|^{α(x)-2}u + f(x,u)` in Ω, `u = 0` outside Ω.
///
/// `q(x)` is always `p(x,x)`.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub omega: BoxRegion,
    pub s: PairField,
    pub p: PairField,
    pub alpha: PointField,
    pub r: PointField,
    pub nonlinearity: Nonlinearity,
    pub lambda: f64,
}

impl ProblemSpec {
    pub fn dimension(&self) -> usize {
        self.omega.dim
    }

    pub fn q(&self, x: &Point) -> f64 {
        self.p.diag(x)
    }

    /// `p_s*(x) = n p(x,x) / (n - s(x,x) p(x,x))`.
    pub fn critical_exponent(&self, x: &Point) -> Result<f64> {
        let n = self.dimension() as f64;
        let (s, p) = (self.s.diag(x), self.p.diag(x));
        let denom = n - s * p;
        if !(denom > 0.0) {
            return Err(Error::Domain(format!("critical exponent undefined at {x:?}: n - s p = {denom} (s = {s}, p = {p})")));
        }
        Ok(n * p / denom)
    }

    /// Copy with every nonlinearity term in `mode`.
    pub fn with_sign_mode(&self, mode: SignMode) -> Self {
        let mut out = self.clone();
        out.nonlinearity = self.nonlinearity.with_mode(mode);
        out
    }
}

/// Reference problems used by the test suites and the CLI defaults.
pub mod presets {
    use super::*;

    /// n = 1, Ω = (0,1), s ≡ 0.4, p ≡ 2, α ≡ 1.5, f(t) = |t|^{1.5} t (r ≡ 3.5),
    /// M = 1, b = 3.5, λ = 0.05.
    pub fn reference(mode: SignMode) -> ProblemSpec {
        ProblemSpec {
            omega: BoxRegion::unit(1),
            s: PairField::constant("s", 0.4),
            p: PairField::constant("p", 2.0),
            alpha: PointField::constant("alpha", 1.5),
            r: PointField::constant("r", 3.5),
            nonlinearity: Nonlinearity::single_power(1.0, 3.5, mode),
            lambda: 0.05,
        }
    }

    /// The n = 2 analogue on the unit square (s p = 0.8 < 2).
    pub fn reference_2d(mode: SignMode) -> ProblemSpec {
        ProblemSpec { omega: BoxRegion::unit(2), ..reference(mode) }
    }

    /// A variable-exponent variant of the reference problem with p ∈ [2, 2.5] and s ∈ [0.25, 0.35].
    pub fn variable_1d() -> ProblemSpec {
        ProblemSpec {
            omega: BoxRegion::unit(1),
            s: PairField::symmetrized("s", |x, y| 0.25 + 0.05 * (x[0] + y[0]), 0.25, 0.35),
            p: PairField::symmetrized("p", |x, y| 2.0 + 0.25 * (x[0] + y[0]), 2.0, 2.5),
            alpha: PointField::from_fn("alpha", |x| 1.4 + 0.1 * x[0], 1.4, 1.5),
            r: PointField::constant("r", 3.5),
            nonlinearity: Nonlinearity::single_power(1.0, 3.5, SignMode::OddPower),
            lambda: 0.05,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_exponent_values() {
        let a = presets::reference(SignMode::OddPower);
        assert!((a.critical_exponent(&[0.5, 0.0]).unwrap() - 10.0).abs() < 1e-12);

        let b = ProblemSpec { s: PairField::constant("s", 0.5), ..presets::reference_2d(SignMode::OddPower) };
        assert!((b.critical_exponent(&[0.5, 0.5]).unwrap() - 4.0).abs() < 1e-12);

        let c = ProblemSpec {
            s: PairField::symmetrized("s", |x, y| 0.25 + 0.05 * (x[0] + y[0]), 0.25, 0.35),
            p: PairField::symmetrized("p", |x, y| 2.0 + 0.25 * (x[0] + y[0]), 2.0, 2.5),
            ..presets::reference(SignMode::OddPower)
        };
        assert!((c.critical_exponent(&[0.0, 0.0]).unwrap() - 4.0).abs() < 1e-12);
        let x = [0.7, 0.0];
        assert!(c.critical_exponent(&x).unwrap() > c.q(&x));
    }

    #[test]
    fn critical_exponent_rejects_nonpositive_denominator() {
        let bad = ProblemSpec { s: PairField::constant("s", 0.5), ..presets::reference(SignMode::OddPower) };
        assert!(matches!(bad.critical_exponent(&[0.5, 0.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn box_geometry() {
        let b = BoxRegion::new(&[0.0, -1.0], &[2.0, 1.0]).unwrap();
        assert_eq!(b.measure(), 4.0);
        assert!((b.diameter() - 8f64.sqrt()).abs() < 1e-15);
        assert!(b.contains(&[1.0, 0.0]));
        assert!(!b.contains(&[2.0, 0.0]));
        assert!((b.distance_outside(&[3.0, 2.0]) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(b.distance_to_boundary(&[1.5, 0.0]), 0.5);
        assert_eq!(b.corners().len(), 4);
        assert!(BoxRegion::new(&[1.0], &[0.0]).is_err());
    }
}
