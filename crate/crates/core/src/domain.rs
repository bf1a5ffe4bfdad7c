//! Cell-centered grids over Ω with an exterior collar.
//!
//! Interior nodes carry the unknowns. Collar nodes sit on the same lattice
//! outside Ω̄, within `R = collar_factor · diam(Ω)` of Ω; they hold `u = 0`
//! but remain explicit kernel partners. Beyond the collar the kernel is
//! integrated in closed form by [`tail_weight`].

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::problem::{BoxRegion, FrozenTerm, ProblemSpec};
use crate::{Error, Point, Result};

/// Values on the interior nodes; zero on the collar and beyond.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::numeric("grid function", format!("entry {i} is {}", values[i])));
        }
        Ok(GridFunction { values })
    }

    pub fn zeros(len: usize) -> Self {
        GridFunction { values: vec![0.0; len] }
    }

    pub(crate) fn from_vec_unchecked(values: Vec<f64>) -> Self {
        GridFunction { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    pub fn linf(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn scaled(&self, c: f64) -> Self {
        GridFunction { values: self.values.iter().map(|v| c * v).collect() }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        GridFunction { values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }
}

impl AsRef<[f64]> for GridFunction {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

/// Collar partners of one interior node.
#[derive(Debug, Clone)]
pub(crate) enum CollarRow {
    /// Every partner shares the exponent; the weights are pre-summed.
    Uniform {
        weight: f64,
        exponent: f64,
    },
    Mixed {
        weights: Vec<f64>,
        exponents: Vec<f64>,
    },
}

/// Pair weights `w_ij = |cell|² / |x_i - x_j|^{n + s_ij p_ij}` and exponents
/// `p_ij`, frozen at cell centers.
#[derive(Debug, Clone)]
pub(crate) struct Kernel {
    pub n: usize,
    /// Row-major `n × n`, zero diagonal.
    pub weights: Vec<f64>,
    pub exponents: Vec<f64>,
    pub collar: Vec<CollarRow>,
}

impl Kernel {
    #[inline]
    pub fn w(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.n + j]
    }

    #[inline]
    pub fn p(&self, i: usize, j: usize) -> f64 {
        self.exponents[i * self.n + j]
    }
}

/// Per-node problem data frozen at the interior cell centers.
#[derive(Debug, Clone)]
pub(crate) struct NodeData {
    pub p_diag: Vec<f64>,
    pub s_diag: Vec<f64>,
    /// `tail_weight(x_i)`, not yet multiplied by the cell measure.
    pub tail: Vec<f64>,
    pub alpha: Vec<f64>,
    pub terms: Vec<Vec<FrozenTerm>>,
}

/// The discretized problem geometry.
#[derive(Debug, Clone)]
pub struct DiscreteDomain {
    pub omega: BoxRegion,
    pub cells_per_axis: usize,
    pub h: [f64; 2],
    pub cell_measure: f64,
    pub collar_factor: f64,
    pub collar_radius: f64,
    pub interior: Vec<Point>,
    pub collar: Vec<Point>,
    pub(crate) kernel: Kernel,
    pub(crate) nodes: NodeData,
}

/// Mixed-exponent collar storage above this many entries is refused.
const MAX_MIXED_COLLAR_ENTRIES: usize = 20_000_000;

/// `σ_{n-1} R^{-sp} / (sp)`: the kernel mass of `{|y - x| > R}`.
pub fn radial_tail(dim: usize, sp: f64, radius: f64) -> f64 {
    let sphere = if dim == 1 { 2.0 } else { 2.0 * PI };
    sphere * radius.powf(-sp) / sp
}

/// Kernel mass beyond the collar seen from `x`, with `s`, `p` frozen at `(x,x)`.
///
/// `R_x` is the distance from `x` to the outer boundary of the collar,
/// `collar_radius + dist(x, ∂Ω)` for interior `x`.
pub fn tail_weight(domain: &DiscreteDomain, spec: &ProblemSpec, x: &Point) -> f64 {
    let rx = domain.collar_radius + domain.omega.distance_to_boundary(x).max(0.0);
    radial_tail(domain.omega.dim, spec.s.diag(x) * spec.p.diag(x), rx)
}

fn distance(a: &Point, b: &Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Builds the grid, collar, frozen node data, and kernel cache.
pub fn build_domain(spec: &ProblemSpec, cells_per_axis: usize, collar_factor: f64) -> Result<DiscreteDomain> {
    if cells_per_axis < 2 {
        return Err(Error::Config(format!("cells_per_axis must be >= 2, got {cells_per_axis}")));
    }
    if !(collar_factor >= 1.0 && collar_factor.is_finite()) {
        return Err(Error::Config(format!("collar_factor must be >= 1, got {collar_factor}")));
    }
    let omega = spec.omega;
    let dim = omega.dim;
    let mut h = [0.0; 2];
    for (k, hk) in h.iter_mut().enumerate().take(dim) {
        *hk = omega.side(k) / cells_per_axis as f64;
    }
    let cell_measure: f64 = h[..dim].iter().product();
    let collar_radius = collar_factor * omega.diameter();

    let center = |idx: [i64; 2]| -> Point {
        let mut x = [0.0; 2];
        for k in 0..dim {
            x[k] = omega.lo[k] + (idx[k] as f64 + 0.5) * h[k];
        }
        x
    };

    let cells = cells_per_axis as i64;
    let mut interior = Vec::new();
    if dim == 1 {
        for i in 0..cells {
            interior.push(center([i, 0]));
        }
    } else {
        for j in 0..cells {
            for i in 0..cells {
                interior.push(center([i, j]));
            }
        }
    }

    let ext: Vec<i64> = (0..dim).map(|k| (collar_radius / h[k]).ceil() as i64 + 1).collect();
    let mut collar = Vec::new();
    let inside = |i: i64| (0..cells).contains(&i);
    if dim == 1 {
        for i in -ext[0]..cells + ext[0] {
            if inside(i) {
                continue;
            }
            let x = center([i, 0]);
            if omega.distance_outside(&x) <= collar_radius {
                collar.push(x);
            }
        }
    } else {
        for j in -ext[1]..cells + ext[1] {
            for i in -ext[0]..cells + ext[0] {
                if inside(i) && inside(j) {
                    continue;
                }
                let x = center([i, j]);
                if omega.distance_outside(&x) <= collar_radius {
                    collar.push(x);
                }
            }
        }
    }

    let n = interior.len();
    let nd = dim as f64;
    let cm2 = cell_measure * cell_measure;
    let weight = |x: &Point, y: &Point| -> (f64, f64) {
        let p = spec.p.eval(x, y);
        let s = spec.s.eval(x, y);
        (cm2 / distance(x, y).powf(nd + s * p), p)
    };

    let mut weights = vec![0.0; n * n];
    let mut exponents = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let (w, p) = weight(&interior[i], &interior[j]);
            if !(w.is_finite() && w > 0.0 && p.is_finite()) {
                return Err(Error::PairWeight { i, j, weight: w });
            }
            weights[i * n + j] = w;
            weights[j * n + i] = w;
            exponents[i * n + j] = p;
            exponents[j * n + i] = p;
        }
        exponents[i * n + i] = spec.p.diag(&interior[i]);
    }

    let mut mixed_entries = 0usize;
    let mut collar_rows = Vec::with_capacity(n);
    for (i, x) in interior.iter().enumerate() {
        let mut ws = Vec::with_capacity(collar.len());
        let mut ps = Vec::with_capacity(collar.len());
        for (jc, y) in collar.iter().enumerate() {
            let (w, p) = weight(x, y);
            if !(w.is_finite() && w > 0.0 && p.is_finite()) {
                return Err(Error::PairWeight { i, j: n + jc, weight: w });
            }
            ws.push(w);
            ps.push(p);
        }
        let first = ps.first().copied().unwrap_or(2.0);
        if ps.iter().all(|&p| p == first) {
            collar_rows.push(CollarRow::Uniform { weight: crate::reduce::pairwise_sum(&ws), exponent: first });
        } else {
            mixed_entries += ws.len();
            if mixed_entries > MAX_MIXED_COLLAR_ENTRIES {
                return Err(Error::Config(format!(
                    "collar kernel needs more than {MAX_MIXED_COLLAR_ENTRIES} variable-exponent entries; reduce cells or collar_factor"
                )));
            }
            collar_rows.push(CollarRow::Mixed { weights: ws, exponents: ps });
        }
    }

    let mut domain = DiscreteDomain {
        omega,
        cells_per_axis,
        h,
        cell_measure,
        collar_factor,
        collar_radius,
        interior,
        collar,
        kernel: Kernel { n, weights, exponents, collar: collar_rows },
        nodes: NodeData { p_diag: vec![], s_diag: vec![], tail: vec![], alpha: vec![], terms: vec![] },
    };
    let nodes = NodeData {
        p_diag: domain.interior.iter().map(|x| spec.p.diag(x)).collect(),
        s_diag: domain.interior.iter().map(|x| spec.s.diag(x)).collect(),
        tail: domain.interior.iter().map(|x| tail_weight(&domain, spec, x)).collect(),
        alpha: domain.interior.iter().map(|x| spec.alpha.eval(x)).collect(),
        terms: domain.interior.iter().map(|x| spec.nonlinearity.freeze(x)).collect(),
    };
    domain.nodes = nodes;
    Ok(domain)
}

/// Node layout for plotting.
#[derive(Debug, Clone, Serialize)]
pub struct DomainSummary {
    pub dimension: usize,
    pub cells_per_axis: usize,
    pub h: Vec<f64>,
    pub cell_measure: f64,
    pub collar_radius: f64,
    pub interior_count: usize,
    pub collar_count: usize,
    pub interior: Vec<Vec<f64>>,
    pub collar: Vec<Vec<f64>>,
}

impl DiscreteDomain {
    pub fn dim(&self) -> usize {
        self.omega.dim
    }

    pub fn len(&self) -> usize {
        self.interior.len()
    }

    pub fn is_empty(&self) -> bool {
        self.interior.is_empty()
    }

    /// Samples `f` at the interior nodes.
    pub fn sample(&self, f: impl Fn(&Point) -> f64) -> GridFunction {
        GridFunction::from_vec_unchecked(self.interior.iter().map(f).collect())
    }

    /// `w_ij` between interior nodes `i != j`.
    pub fn pair_weight(&self, i: usize, j: usize) -> f64 {
        self.kernel.w(i, j)
    }

    /// Frozen `p(x_i, x_i)`.
    pub fn diag_exponent(&self, i: usize) -> f64 {
        self.nodes.p_diag[i]
    }

    /// Frozen `tail_weight(x_i)`.
    pub fn tail(&self, i: usize) -> f64 {
        self.nodes.tail[i]
    }

    /// `p_s*(x_i) = n p / (n - s p)` with `s, p` on the diagonal; infinite
    /// when `s p ≥ n`.
    pub fn critical_exponent_at(&self, i: usize) -> f64 {
        let n = self.dim() as f64;
        let sp = self.nodes.s_diag[i] * self.nodes.p_diag[i];
        if sp >= n {
            f64::INFINITY
        } else {
            n * self.nodes.p_diag[i] / (n - sp)
        }
    }

    /// `(p⁻, p⁺)` over the frozen kernel exponents, including the diagonal.
    pub fn exponent_range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &p in self.kernel.exponents.iter().chain(&self.nodes.p_diag) {
            lo = lo.min(p);
            hi = hi.max(p);
        }
        for row in &self.kernel.collar {
            match row {
                CollarRow::Uniform { exponent, .. } => {
                    lo = lo.min(*exponent);
                    hi = hi.max(*exponent);
                }
                CollarRow::Mixed { exponents, .. } => {
                    for &p in exponents {
                        lo = lo.min(p);
                        hi = hi.max(p);
                    }
                }
            }
        }
        (lo, hi)
    }

    pub fn summary(&self) -> DomainSummary {
        let dim = self.dim();
        let coords = |pts: &[Point]| pts.iter().map(|p| p[..dim].to_vec()).collect();
        DomainSummary {
            dimension: dim,
            cells_per_axis: self.cells_per_axis,
            h: self.h[..dim].to_vec(),
            cell_measure: self.cell_measure,
            collar_radius: self.collar_radius,
            interior_count: self.interior.len(),
            collar_count: self.collar.len(),
            interior: coords(&self.interior),
            collar: coords(&self.collar),
        }
    }
}
