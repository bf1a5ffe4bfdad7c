use std::fmt;
use std::sync::Arc;

use crate::Point;

type PairFn = Arc<dyn Fn(&Point, &Point) -> f64 + Send + Sync>;
type PointFn = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;

/// A real field of a point pair, such as the order `s(x,y)` or the exponent
/// `p(x,y)`, with declared infimum and supremum over the ambient box.
#[derive(Clone)]
pub struct PairField {
    name: String,
    eval: PairFn,
    declared_min: f64,
    declared_max: f64,
    constant: Option<f64>,
}

impl PairField {
    pub fn constant(name: &str, value: f64) -> Self {
        PairField {
            name: name.to_string(),
            eval: Arc::new(move |_, _| value),
            declared_min: value,
            declared_max: value,
            constant: Some(value),
        }
    }

    /// Wraps `f` as `(f(x,y) + f(y,x)) / 2`, which is symmetric exactly.
    pub fn symmetrized<F>(name: &str, f: F, declared_min: f64, declared_max: f64) -> Self
    where
        F: Fn(&Point, &Point) -> f64 + Send + Sync + 'static,
    {
        PairField {
            name: name.to_string(),
            eval: Arc::new(move |x, y| 0.5 * (f(x, y) + f(y, x))),
            declared_min,
            declared_max,
            constant: None,
        }
    }

    /// Uses `f` as given. Symmetry is then only checked by sampling.
    pub fn unsymmetrized<F>(name: &str, f: F, declared_min: f64, declared_max: f64) -> Self
    where
        F: Fn(&Point, &Point) -> f64 + Send + Sync + 'static,
    {
        PairField { name: name.to_string(), eval: Arc::new(f), declared_min, declared_max, constant: None }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn eval(&self, x: &Point, y: &Point) -> f64 {
        (self.eval)(x, y)
    }

    #[inline]
    pub fn diag(&self, x: &Point) -> f64 {
        (self.eval)(x, x)
    }

    pub fn declared_min(&self) -> f64 {
        self.declared_min
    }

    pub fn declared_max(&self) -> f64 {
        self.declared_max
    }

    pub fn constant_value(&self) -> Option<f64> {
        self.constant
    }
}

impl fmt::Debug for PairField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PairField")
            .field("name", &self.name)
            .field("declared_min", &self.declared_min)
            .field("declared_max", &self.declared_max)
            .field("constant", &self.constant)
            .finish()
    }
}

/// A real field of one point: `alpha(x)`, `r(x)`, a coefficient `c(x)`, ...
#[derive(Clone)]
pub struct PointField {
    name: String,
    eval: PointFn,
    declared_min: f64,
    declared_max: f64,
    constant: Option<f64>,
}

impl PointField {
    pub fn constant(name: &str, value: f64) -> Self {
        PointField {
            name: name.to_string(),
            eval: Arc::new(move |_| value),
            declared_min: value,
            declared_max: value,
            constant: Some(value),
        }
    }

    pub fn from_fn<F>(name: &str, f: F, declared_min: f64, declared_max: f64) -> Self
    where
        F: Fn(&Point) -> f64 + Send + Sync + 'static,
    {
        PointField { name: name.to_string(), eval: Arc::new(f), declared_min, declared_max, constant: None }
    }

    /// Same evaluator, new declared bounds.
    pub fn with_bounds(mut self, declared_min: f64, declared_max: f64) -> Self {
        self.declared_min = declared_min;
        self.declared_max = declared_max;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn eval(&self, x: &Point) -> f64 {
        (self.eval)(x)
    }

    pub fn declared_min(&self) -> f64 {
        self.declared_min
    }

    pub fn declared_max(&self) -> f64 {
        self.declared_max
    }

    pub fn constant_value(&self) -> Option<f64> {
        self.constant
    }
}

impl fmt::Debug for PointField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PointField")
            .field("name", &self.name)
            .field("declared_min", &self.declared_min)
            .field("declared_max", &self.declared_max)
            .field("constant", &self.constant)
            .finish()
    }
}
