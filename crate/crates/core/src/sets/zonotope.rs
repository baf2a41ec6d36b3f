use super::{check_dim, check_finite, ConvexSet, SetError, SetResult};
use crate::matfun::{IntervalMatrix, Norm};
use crate::{Matrix, Vector};

/// `{c + G ξ : ξ ∈ [−1, 1]^m}` with generators as the columns of `G`.
#[derive(Debug, Clone, PartialEq)]
pub struct Zonotope {
    pub center: Vector,
    pub generators: Matrix,
}

impl Zonotope {
    pub fn new(center: Vector, generators: Matrix) -> SetResult<Self> {
        check_dim(center.len(), generators.nrows())?;
        check_finite(&center, "center")?;
        if generators.iter().any(|x| !x.is_finite()) {
            return Err(SetError::NonFinite("generators"));
        }
        Ok(Zonotope { center, generators })
    }

    pub fn point(center: Vector) -> Self {
        let n = center.len();
        Zonotope {
            center,
            generators: Matrix::zeros(n, 0),
        }
    }

    /// Axis-aligned box as a zonotope; zero radii produce no generator.
    pub fn from_box(center: Vector, radius: &Vector) -> Self {
        let n = center.len();
        let cols: Vec<usize> = (0..n).filter(|&i| radius[i] != 0.0).collect();
        let mut g = Matrix::zeros(n, cols.len());
        for (k, &i) in cols.iter().enumerate() {
            g[(i, k)] = radius[i];
        }
        Zonotope {
            center,
            generators: g,
        }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// Number of generators.
    pub fn order(&self) -> usize {
        self.generators.ncols()
    }

    pub fn support(&self, d: &Vector) -> f64 {
        self.center.dot(d) + self.generators.tr_mul(d).iter().map(|x| x.abs()).sum::<f64>()
    }

    pub fn linear_map(&self, m: &Matrix) -> SetResult<Zonotope> {
        check_dim(m.ncols(), self.dim())?;
        Ok(Zonotope {
            center: m * &self.center,
            generators: m * &self.generators,
        })
    }

    /// Exact Minkowski sum: centers add, generator lists concatenate.
    pub fn minkowski_sum(&self, other: &Zonotope) -> SetResult<Zonotope> {
        check_dim(self.dim(), other.dim())?;
        let n = self.dim();
        let (m1, m2) = (self.order(), other.order());
        let mut g = Matrix::zeros(n, m1 + m2);
        g.view_mut((0, 0), (n, m1)).copy_from(&self.generators);
        g.view_mut((0, m1), (n, m2)).copy_from(&other.generators);
        Ok(Zonotope {
            center: &self.center + &other.center,
            generators: g,
        })
    }

    pub fn scale(&self, c: f64) -> Zonotope {
        Zonotope {
            center: &self.center * c,
            generators: &self.generators * c,
        }
    }

    /// Drops generator columns that are identically zero.
    pub fn remove_zero_generators(&self) -> Zonotope {
        let keep: Vec<usize> = (0..self.order())
            .filter(|&j| self.generators.column(j).iter().any(|&x| x != 0.0))
            .collect();
        Zonotope {
            center: self.center.clone(),
            generators: self.generators.select_columns(&keep),
        }
    }

    /// `Σ_j |g_j|`, the box radius of the zonotope's interval hull.
    pub fn abs_generator_sum(&self) -> Vector {
        let mut r = Vector::zeros(self.dim());
        for g in self.generators.column_iter() {
            r += g.abs();
        }
        r
    }
}

pub(super) fn exact_zonotope(x: &ConvexSet) -> Option<Zonotope> {
    match x {
        ConvexSet::Singleton(p) => Some(Zonotope::point(p.clone())),
        ConvexSet::Hyperrectangle(h) => Some(Zonotope::from_box(h.center.clone(), &h.radius)),
        ConvexSet::Ball(b) => match b.norm {
            Norm::Inf => Some(Zonotope::from_box(
                b.center.clone(),
                &Vector::from_element(b.dim(), b.radius),
            )),
            // A 1-ball is a zonotope only up to dimension 2 and a 2-ball only in dimension 1.
            _ if b.dim() == 1 => Some(Zonotope::from_box(
                b.center.clone(),
                &Vector::from_element(1, b.radius),
            )),
            _ => None,
        },
        ConvexSet::Zonotope(z) => Some(z.clone()),
        ConvexSet::Sum(a, b) => exact_zonotope(a)?.minkowski_sum(&exact_zonotope(b)?).ok(),
        ConvexSet::Map(m, y) => exact_zonotope(y)?.linear_map(m).ok(),
        ConvexSet::Scale(c, y) => Some(exact_zonotope(y)?.scale(*c)),
        ConvexSet::Hull(..) | ConvexSet::Oracle(_) => None,
    }
}

/// Zonotope enclosing `CH(X₀, ΦX₀)`.
///
/// With `X₀ = (c, G)`: center `(c + Φc)/2`, generators `(g + Φg)/2`,
/// `(g − Φg)/2` for each `g`, and `(c − Φc)/2`.
pub fn zonotope_hull(x0: &Zonotope, phi: &Matrix) -> SetResult<Zonotope> {
    let n = x0.dim();
    if phi.nrows() != n || phi.ncols() != n {
        return Err(SetError::DimensionMismatch {
            expected: n,
            found: if phi.nrows() != n {
                phi.nrows()
            } else {
                phi.ncols()
            },
        });
    }
    let pc = phi * &x0.center;
    let pg = phi * &x0.generators;
    let m = x0.order();
    let mut g = Matrix::zeros(n, 2 * m + 1);
    for j in 0..m {
        let gj = x0.generators.column(j);
        let pj = pg.column(j);
        g.set_column(j, &((gj + pj) * 0.5));
        g.set_column(m + j, &((gj - pj) * 0.5));
    }
    g.set_column(2 * m, &((&x0.center - &pc) * 0.5));
    Ok(Zonotope {
        center: (&x0.center + pc) * 0.5,
        generators: g,
    })
}

/// Zonotope enclosing `{M x : M ∈ [lo, hi], x ∈ Z}`.
///
/// Midpoint-radius split `M = C ± R`: result `C Z ⊕ box(0, R(|c| + Σ|g|))`.
pub fn interval_map(m: &IntervalMatrix, z: &Zonotope) -> SetResult<Zonotope> {
    let (rows, cols) = m.shape();
    check_dim(cols, z.dim())?;
    let c = m.mid();
    let r = m.rad();
    let image = z.linear_map(&c)?;
    let extent = z.center.abs() + z.abs_generator_sum();
    let bloat = (&r * extent).map(|x| if x == 0.0 { 0.0 } else { x.next_up() });
    let bloat_z = Zonotope::from_box(Vector::zeros(rows), &bloat);
    image.minkowski_sum(&bloat_z)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> Vector {
        Vector::from_column_slice(x)
    }

    #[test]
    fn identity_hull_reproduces_x0() {
        let z = Zonotope::new(
            v(&[1.0, -1.0]),
            Matrix::from_row_slice(2, 2, &[0.5, 0.1, 0.0, 0.3]),
        )
        .unwrap();
        let h = zonotope_hull(&z, &Matrix::identity(2, 2)).unwrap();
        assert_eq!(h.center, z.center);
        let trimmed = h.remove_zero_generators();
        assert_eq!(trimmed.generators, z.generators);
    }

    #[test]
    fn singleton_hull_is_segment() {
        let z = Zonotope::point(v(&[1.0, 0.0]));
        let phi = Matrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let h = zonotope_hull(&z, &phi).unwrap().remove_zero_generators();
        assert_eq!(h.center, v(&[0.5, 0.5]));
        assert_eq!(h.order(), 1);
        assert_eq!(h.support(&v(&[1.0, 0.0])), 1.0);
        assert_eq!(h.support(&v(&[0.0, 1.0])), 1.0);
        assert_eq!(h.support(&v(&[1.0, 1.0])), 1.0);
        assert_eq!(h.support(&v(&[-1.0, 0.0])), 0.0);
    }

    #[test]
    fn degenerate_interval_map_is_linear_map() {
        let z = Zonotope::new(v(&[1.0, 2.0]), Matrix::from_row_slice(2, 1, &[0.5, -0.5])).unwrap();
        let m = Matrix::from_row_slice(2, 2, &[1.0, 2.0, -3.0, 0.5]);
        let out = interval_map(&IntervalMatrix::point(m.clone()), &z).unwrap();
        let exact = z.linear_map(&m).unwrap();
        assert_eq!(out.center, exact.center);
        assert_eq!(out.remove_zero_generators().generators, exact.generators);
    }

    #[test]
    fn interval_map_of_origin_is_origin() {
        let z = Zonotope::point(Vector::zeros(3));
        let out = interval_map(&IntervalMatrix::symmetric(3, 3, 0.25), &z).unwrap();
        assert_eq!(out.center, Vector::zeros(3));
        assert_eq!(out.order(), 0);
    }

    #[test]
    fn exact_conversion() {
        let b = ConvexSet::ball(Norm::Inf, v(&[0.0, 10.0]), 0.1).unwrap();
        let z = b.to_zonotope().unwrap();
        assert_eq!(z.order(), 2);
        let sum = ConvexSet::sum(b.clone(), ConvexSet::origin(2)).unwrap();
        assert!(sum.to_zonotope().is_some());
        let hull = ConvexSet::hull(b.clone(), b).unwrap();
        assert!(hull.to_zonotope().is_none());
        assert!(ConvexSet::ball(Norm::Two, v(&[0.0, 0.0]), 1.0)
            .unwrap()
            .to_zonotope()
            .is_none());
    }
}
