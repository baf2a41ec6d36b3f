//! Convex sets represented through their support functions.
//!
//! [`ConvexSet`] is either a concrete leaf, for which `ρ(d, X)` has a closed
//! form, or a lazy node composing other sets. Lazy nodes are never simplified
//! on construction; [`box_approximation`] and [`polygon_outline`] are the
//! explicit ways to concretize.

mod approx;
mod membership;
mod polygon;
mod zonotope;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use crate::matfun::Norm;
use crate::{Matrix, Vector};

pub use approx::{
    box_approximation, interval_bounds, scaled_box_intersection, set_norm,
    symmetric_interval_hull,
};
pub use membership::{
    random_directions, sample, violates_membership, violates_membership_tol, MEMBERSHIP_TOL,
};
pub use polygon::{polygon_area, polygon_outline, polygon_outline_with_offset};
pub use zonotope::{interval_map, zonotope_hull, Zonotope};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SetError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("radius must be nonnegative")]
    NegativeRadius,

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type SetResult<T> = Result<T, SetError>;

/// Support oracle `d ↦ ρ(d, X)` for sets known only through their support.
pub type SupportFn = dyn Fn(&Vector) -> f64 + Send + Sync;

/// Axis-aligned box `{x : |x − c| ≤ r}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperrectangle {
    pub center: Vector,
    pub radius: Vector,
}

impl Hyperrectangle {
    pub fn new(center: Vector, radius: Vector) -> SetResult<Self> {
        check_dim(center.len(), radius.len())?;
        check_finite(&center, "center")?;
        check_finite(&radius, "radius")?;
        if radius.iter().any(|&r| r < 0.0) {
            return Err(SetError::NegativeRadius);
        }
        Ok(Hyperrectangle { center, radius })
    }

    /// Origin-centered box.
    pub fn symmetric(radius: Vector) -> SetResult<Self> {
        let n = radius.len();
        Self::new(Vector::zeros(n), radius)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn low(&self) -> Vector {
        &self.center - &self.radius
    }

    pub fn high(&self) -> Vector {
        &self.center + &self.radius
    }

    pub fn support(&self, d: &Vector) -> f64 {
        self.center.dot(d) + self.radius.dot(&d.abs())
    }
}

/// Norm ball `{x : ‖x − c‖_p ≤ r}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub norm: Norm,
    pub center: Vector,
    pub radius: f64,
}

impl Ball {
    pub fn new(norm: Norm, center: Vector, radius: f64) -> SetResult<Self> {
        check_finite(&center, "center")?;
        if !radius.is_finite() {
            return Err(SetError::NonFinite("radius"));
        }
        if radius < 0.0 {
            return Err(SetError::NegativeRadius);
        }
        Ok(Ball {
            norm,
            center,
            radius,
        })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn support(&self, d: &Vector) -> f64 {
        self.center.dot(d) + self.radius * self.norm.dual().of_vector(d)
    }
}

/// Set given only by a support oracle.
#[derive(Clone)]
pub struct SupportOracle {
    dim: usize,
    label: String,
    f: Arc<SupportFn>,
}

impl SupportOracle {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, d: &Vector) -> f64 {
        (self.f)(d)
    }
}

impl fmt::Debug for SupportOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SupportOracle")
            .field("dim", &self.dim)
            .field("label", &self.label)
            .finish_non_exhaustive()
    }
}

/// Compact convex set: a concrete leaf or a lazy operation tree.
#[derive(Debug, Clone)]
pub enum ConvexSet {
    Singleton(Vector),
    Hyperrectangle(Hyperrectangle),
    Ball(Ball),
    Zonotope(Zonotope),
    /// Minkowski sum.
    Sum(Arc<ConvexSet>, Arc<ConvexSet>),
    /// Linear image `M X`.
    Map(Arc<Matrix>, Arc<ConvexSet>),
    /// Convex hull of the union.
    Hull(Arc<ConvexSet>, Arc<ConvexSet>),
    /// `c X` for a real scalar `c`.
    Scale(f64, Arc<ConvexSet>),
    Oracle(SupportOracle),
}

impl From<Hyperrectangle> for ConvexSet {
    fn from(h: Hyperrectangle) -> Self {
        ConvexSet::Hyperrectangle(h)
    }
}

impl From<Ball> for ConvexSet {
    fn from(b: Ball) -> Self {
        ConvexSet::Ball(b)
    }
}

impl From<Zonotope> for ConvexSet {
    fn from(z: Zonotope) -> Self {
        ConvexSet::Zonotope(z)
    }
}

fn check_dim(expected: usize, found: usize) -> SetResult<()> {
    if expected == found {
        Ok(())
    } else {
        Err(SetError::DimensionMismatch { expected, found })
    }
}

fn check_finite(v: &Vector, what: &'static str) -> SetResult<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(SetError::NonFinite(what))
    }
}

impl ConvexSet {
    pub fn singleton(x: Vector) -> SetResult<Self> {
        check_finite(&x, "point")?;
        Ok(ConvexSet::Singleton(x))
    }

    /// `{0} ⊂ ℝⁿ`.
    pub fn origin(n: usize) -> Self {
        ConvexSet::Singleton(Vector::zeros(n))
    }

    pub fn hyperrectangle(center: Vector, radius: Vector) -> SetResult<Self> {
        Ok(Hyperrectangle::new(center, radius)?.into())
    }

    pub fn ball(norm: Norm, center: Vector, radius: f64) -> SetResult<Self> {
        Ok(Ball::new(norm, center, radius)?.into())
    }

    /// Zonotope with generators as the columns of `generators`.
    pub fn zonotope(center: Vector, generators: Matrix) -> SetResult<Self> {
        Ok(Zonotope::new(center, generators)?.into())
    }

    pub fn sum(a: impl Into<Arc<ConvexSet>>, b: impl Into<Arc<ConvexSet>>) -> SetResult<Self> {
        let (a, b) = (a.into(), b.into());
        check_dim(a.dim(), b.dim())?;
        Ok(ConvexSet::Sum(a, b))
    }

    pub fn map(m: impl Into<Arc<Matrix>>, x: impl Into<Arc<ConvexSet>>) -> SetResult<Self> {
        let (m, x) = (m.into(), x.into());
        check_dim(m.ncols(), x.dim())?;
        if m.iter().any(|v| !v.is_finite()) {
            return Err(SetError::NonFinite("map matrix"));
        }
        Ok(ConvexSet::Map(m, x))
    }

    pub fn hull(a: impl Into<Arc<ConvexSet>>, b: impl Into<Arc<ConvexSet>>) -> SetResult<Self> {
        let (a, b) = (a.into(), b.into());
        check_dim(a.dim(), b.dim())?;
        Ok(ConvexSet::Hull(a, b))
    }

    pub fn scale(c: f64, x: impl Into<Arc<ConvexSet>>) -> SetResult<Self> {
        if !c.is_finite() {
            return Err(SetError::NonFinite("scale factor"));
        }
        Ok(ConvexSet::Scale(c, x.into()))
    }

    /// Set defined by its support function. The caller guarantees `f` is the
    /// support function of a compact convex set (or an upper bound of one).
    pub fn oracle<F>(dim: usize, label: impl Into<String>, f: F) -> Self
    where
        F: Fn(&Vector) -> f64 + Send + Sync + 'static,
    {
        ConvexSet::Oracle(SupportOracle {
            dim,
            label: label.into(),
            f: Arc::new(f),
        })
    }

    /// Minkowski sum of a nonempty sequence, folded left.
    pub fn sum_all<I>(sets: I) -> SetResult<Self>
    where
        I: IntoIterator<Item = ConvexSet>,
    {
        let mut it = sets.into_iter();
        let first = it
            .next()
            .ok_or_else(|| SetError::InvalidArgument("empty Minkowski sum".into()))?;
        it.try_fold(first, ConvexSet::sum)
    }

    /// Convex hull of a nonempty sequence as a balanced binary tree.
    pub fn hull_all(mut sets: Vec<ConvexSet>) -> SetResult<Self> {
        if sets.is_empty() {
            return Err(SetError::InvalidArgument("empty convex hull".into()));
        }
        while sets.len() > 1 {
            let mut next = Vec::with_capacity(sets.len().div_ceil(2));
            let mut it = sets.into_iter();
            while let Some(a) = it.next() {
                match it.next() {
                    Some(b) => next.push(ConvexSet::hull(a, b)?),
                    None => next.push(a),
                }
            }
            sets = next;
        }
        Ok(sets.pop().unwrap())
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexSet::Singleton(x) => x.len(),
            ConvexSet::Hyperrectangle(h) => h.dim(),
            ConvexSet::Ball(b) => b.dim(),
            ConvexSet::Zonotope(z) => z.dim(),
            ConvexSet::Sum(a, _) | ConvexSet::Hull(a, _) => a.dim(),
            ConvexSet::Map(m, _) => m.nrows(),
            ConvexSet::Scale(_, x) => x.dim(),
            ConvexSet::Oracle(o) => o.dim,
        }
    }

    pub fn is_lazy(&self) -> bool {
        !matches!(
            self,
            ConvexSet::Singleton(_)
                | ConvexSet::Hyperrectangle(_)
                | ConvexSet::Ball(_)
                | ConvexSet::Zonotope(_)
        )
    }

    /// Center of a concrete leaf; `None` for lazy nodes.
    pub fn center(&self) -> Option<Vector> {
        match self {
            ConvexSet::Singleton(x) => Some(x.clone()),
            ConvexSet::Hyperrectangle(h) => Some(h.center.clone()),
            ConvexSet::Ball(b) => Some(b.center.clone()),
            ConvexSet::Zonotope(z) => Some(z.center.clone()),
            _ => None,
        }
    }

    /// True for `{0}`-like leaves: a point at the origin or a leaf of zero extent there.
    pub fn is_origin(&self) -> bool {
        match self {
            ConvexSet::Singleton(x) => x.iter().all(|&v| v == 0.0),
            ConvexSet::Hyperrectangle(h) => {
                h.center.iter().all(|&v| v == 0.0) && h.radius.iter().all(|&v| v == 0.0)
            }
            ConvexSet::Ball(b) => b.center.iter().all(|&v| v == 0.0) && b.radius == 0.0,
            ConvexSet::Zonotope(z) => {
                z.center.iter().all(|&v| v == 0.0) && z.generators.iter().all(|&v| v == 0.0)
            }
            _ => false,
        }
    }

    /// Support function `ρ(d, X) = sup_{x∈X} d·x`.
    pub fn support(&self, d: &Vector) -> SetResult<f64> {
        check_dim(self.dim(), d.len())?;
        check_finite(d, "direction")?;
        Ok(self.support_unchecked(d))
    }

    pub(crate) fn support_unchecked(&self, d: &Vector) -> f64 {
        match self {
            ConvexSet::Singleton(x) => x.dot(d),
            ConvexSet::Hyperrectangle(h) => h.support(d),
            ConvexSet::Ball(b) => b.support(d),
            ConvexSet::Zonotope(z) => z.support(d),
            ConvexSet::Sum(a, b) => a.support_unchecked(d) + b.support_unchecked(d),
            ConvexSet::Map(m, x) => x.support_unchecked(&m.tr_mul(d)),
            ConvexSet::Hull(a, b) => a.support_unchecked(d).max(b.support_unchecked(d)),
            ConvexSet::Scale(c, x) => x.support_unchecked(&(d * *c)),
            ConvexSet::Oracle(o) => o.eval(d),
        }
    }

    /// Supports along a batch of directions.
    pub fn supports(&self, dirs: &[Vector]) -> SetResult<Vec<f64>> {
        dirs.iter().map(|d| self.support(d)).collect()
    }

    /// Concrete zonotope equal to this set, when one exists without approximation.
    pub fn to_zonotope(&self) -> Option<Zonotope> {
        zonotope::exact_zonotope(self)
    }

    /// Compact description of the operation tree, e.g. `Sum(Hull(Ball∞, Map(Ball∞)), Box)`.
    pub fn describe(&self) -> String {
        match self {
            ConvexSet::Singleton(_) => "Point".into(),
            ConvexSet::Hyperrectangle(_) => "Box".into(),
            ConvexSet::Ball(b) => format!("Ball{}", b.norm),
            ConvexSet::Zonotope(z) => format!("Zonotope[{}]", z.order()),
            ConvexSet::Sum(a, b) => format!("Sum({}, {})", a.describe(), b.describe()),
            ConvexSet::Map(_, x) => format!("Map({})", x.describe()),
            ConvexSet::Hull(a, b) => format!("Hull({}, {})", a.describe(), b.describe()),
            ConvexSet::Scale(c, x) => format!("Scale({c}, {})", x.describe()),
            ConvexSet::Oracle(o) => format!("Oracle({})", o.label),
        }
    }
}
