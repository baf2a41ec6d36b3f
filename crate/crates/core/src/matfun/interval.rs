use super::{ensure_square, ensure_step, norm_inf, MatFunError};
use crate::Matrix;

/// Entrywise interval matrix `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalMatrix {
    lo: Matrix,
    hi: Matrix,
}

impl IntervalMatrix {
    pub fn new(lo: Matrix, hi: Matrix) -> Result<Self, MatFunError> {
        if lo.shape() != hi.shape() {
            return Err(MatFunError::Shape(format!(
                "interval bounds {:?} vs {:?}",
                lo.shape(),
                hi.shape()
            )));
        }
        if lo.iter().chain(hi.iter()).any(|x| !x.is_finite()) {
            return Err(MatFunError::NonFinite);
        }
        if lo.iter().zip(hi.iter()).any(|(l, h)| l > h) {
            return Err(MatFunError::Shape("lower bound exceeds upper bound".into()));
        }
        Ok(IntervalMatrix { lo, hi })
    }

    /// Degenerate interval `[m, m]`.
    pub fn point(m: Matrix) -> Self {
        IntervalMatrix {
            lo: m.clone(),
            hi: m,
        }
    }

    /// Every entry equal to `[-eps, eps]`.
    pub fn symmetric(rows: usize, cols: usize, eps: f64) -> Self {
        let eps = eps.abs();
        IntervalMatrix {
            lo: Matrix::from_element(rows, cols, -eps),
            hi: Matrix::from_element(rows, cols, eps),
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::symmetric(rows, cols, 0.0)
    }

    pub fn lo(&self) -> &Matrix {
        &self.lo
    }

    pub fn hi(&self) -> &Matrix {
        &self.hi
    }

    pub fn shape(&self) -> (usize, usize) {
        self.lo.shape()
    }

    /// Midpoint, rounded to nearest.
    pub fn mid(&self) -> Matrix {
        self.lo.zip_map(&self.hi, |l, h| l + 0.5 * (h - l))
    }

    /// Radius about [`IntervalMatrix::mid`], rounded up so that
    /// `[mid − rad, mid + rad] ⊇ [lo, hi]`.
    pub fn rad(&self) -> Matrix {
        let mid = self.mid();
        Matrix::from_fn(self.lo.nrows(), self.lo.ncols(), |i, j| {
            let m = mid[(i, j)];
            let r = (self.hi[(i, j)] - m).max(m - self.lo[(i, j)]);
            if r == 0.0 {
                0.0
            } else {
                r.next_up()
            }
        })
    }

    pub fn contains(&self, m: &Matrix) -> bool {
        m.shape() == self.shape()
            && m
                .iter()
                .zip(self.lo.iter().zip(self.hi.iter()))
                .all(|(x, (l, h))| l <= x && x <= h)
    }

    pub fn is_subset_of(&self, other: &IntervalMatrix) -> bool {
        self.shape() == other.shape()
            && self
                .lo
                .iter()
                .zip(other.lo.iter())
                .all(|(a, b)| a >= b)
            && self
                .hi
                .iter()
                .zip(other.hi.iter())
                .all(|(a, b)| a <= b)
    }

    /// Interval sum with outward rounding.
    pub fn add(&self, other: &IntervalMatrix) -> Result<IntervalMatrix, MatFunError> {
        self.check_shape(other.shape())?;
        Ok(IntervalMatrix {
            lo: self.lo.zip_map(&other.lo, |a, b| down(a + b)),
            hi: self.hi.zip_map(&other.hi, |a, b| up(a + b)),
        })
    }

    /// `self + [c_lo, c_hi] · M` for a real interval scalar and point matrix.
    pub fn add_scaled(
        &self,
        c_lo: f64,
        c_hi: f64,
        m: &Matrix,
    ) -> Result<IntervalMatrix, MatFunError> {
        self.add(&IntervalMatrix::scalar_times(c_lo, c_hi, m))
    }

    /// `[c_lo, c_hi] · M`, outward rounded.
    pub fn scalar_times(c_lo: f64, c_hi: f64, m: &Matrix) -> IntervalMatrix {
        let lo = m.map(|x| down((c_lo * x).min(c_hi * x)));
        let hi = m.map(|x| up((c_lo * x).max(c_hi * x)));
        IntervalMatrix { lo, hi }
    }

    /// Interval product with a nonnegative-or-any real scalar.
    pub fn scale(&self, c: f64) -> IntervalMatrix {
        let a = self.lo.map(|x| x * c);
        let b = self.hi.map(|x| x * c);
        IntervalMatrix {
            lo: a.zip_map(&b, |x, y| down(x.min(y))),
            hi: a.zip_map(&b, |x, y| up(x.max(y))),
        }
    }

    /// Interval product `self · M` for a point matrix `M`, midpoint-radius form.
    pub fn mul_point(&self, m: &Matrix) -> Result<IntervalMatrix, MatFunError> {
        if self.lo.ncols() != m.nrows() {
            return Err(MatFunError::Shape(format!(
                "interval {:?} times {:?}",
                self.shape(),
                m.shape()
            )));
        }
        let c = self.mid() * m;
        let r = self.rad() * m.abs();
        Ok(IntervalMatrix {
            lo: c.zip_map(&r, |c, r| down(c - r)),
            hi: c.zip_map(&r, |c, r| up(c + r)),
        })
    }

    fn check_shape(&self, shape: (usize, usize)) -> Result<(), MatFunError> {
        if self.shape() != shape {
            return Err(MatFunError::Shape(format!(
                "interval {:?} vs {:?}",
                self.shape(),
                shape
            )));
        }
        Ok(())
    }
}

fn up(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.next_up()
    }
}

fn down(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.next_down()
    }
}

/// Taylor remainder envelope for `e^{Aδ}` truncated after the `p`-th power.
#[derive(Debug, Clone)]
pub struct Remainder {
    pub e: IntervalMatrix,
    pub epsilon: f64,
    pub alpha: f64,
}

/// `E = [−ε, ε]𝟏` with `ε = (‖A‖∞δ)^{p+1}/(p+1)! · 1/(1−α)`,
/// `α = ‖A‖∞δ/(p+2)`.
///
/// Fails with [`MatFunError::CorrectionOrder`] when `α ≥ 1`.
pub fn exp_remainder(a: &Matrix, delta: f64, p: usize) -> Result<Remainder, MatFunError> {
    let n = ensure_square(a)?;
    ensure_step(delta)?;
    let x = norm_inf(a) * delta;
    let alpha = x / (p + 2) as f64;
    if alpha >= 1.0 {
        let min_order = ((x - 2.0).floor() + 1.0).max(1.0) as usize;
        return Err(MatFunError::CorrectionOrder {
            alpha,
            order: p,
            min_order,
        });
    }
    let mut lead = 1.0;
    for j in 1..=p + 1 {
        lead *= x / j as f64;
    }
    let epsilon = up(lead / (1.0 - alpha));
    Ok(Remainder {
        e: IntervalMatrix::symmetric(n, n, epsilon),
        epsilon,
        alpha,
    })
}

/// Correction matrices `F_p` (state curvature) and `G_p` (input integral).
#[derive(Debug, Clone)]
pub struct CorrectionMatrices {
    pub f: IntervalMatrix,
    pub g: IntervalMatrix,
    /// Point terms `Aⁱ δ^{i+1}/(i+1)!` for `i = 0..=p`, whose sum plus `Eδ` is `G_p`.
    pub g_terms: Vec<Matrix>,
    pub remainder: Remainder,
}

/// `F_p = E + Σ_{i=2}^p [δⁱ(i^{−i/(i−1)} − i^{−1/(i−1)}), 0] Aⁱ/i!` and
/// `G_p = Eδ + Σ_{i=0}^p Aⁱ δ^{i+1}/(i+1)!`.
pub fn correction_matrices(
    a: &Matrix,
    delta: f64,
    p: usize,
) -> Result<CorrectionMatrices, MatFunError> {
    let remainder = exp_remainder(a, delta, p)?;
    let n = a.nrows();
    let mut f = remainder.e.clone();
    let mut g_terms = Vec::with_capacity(p + 1);

    let mut pow = Matrix::identity(n, n); // Aⁱ
    let mut inv_fact = 1.0; // 1/i!
    let mut delta_pow = 1.0; // δⁱ
    for i in 0..=p {
        if i > 0 {
            pow = &pow * a;
            inv_fact /= i as f64;
            delta_pow *= delta;
        }
        // Aⁱ δ^{i+1}/(i+1)!
        let coeff = delta_pow * delta * inv_fact / (i + 1) as f64;
        g_terms.push(&pow * coeff);
        if i >= 2 {
            let fi = i as f64;
            let c = delta_pow * (fi.powf(-fi / (fi - 1.0)) - fi.powf(-1.0 / (fi - 1.0)));
            let term = &pow * inv_fact;
            f = f.add_scaled(down(c), 0.0, &term)?;
        }
    }

    let mut g = remainder.e.scale(delta);
    for t in &g_terms {
        g = g.add(&IntervalMatrix::point(t.clone()))?;
    }

    Ok(CorrectionMatrices {
        f,
        g,
        g_terms,
        remainder,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn oscillator() -> Matrix {
        Matrix::from_row_slice(2, 2, &[0.0, 1.0, -4.0 * PI, 0.0])
    }

    #[test]
    fn remainder_of_zero_matrix() {
        let r = exp_remainder(&Matrix::zeros(3, 3), 0.1, 4).unwrap();
        assert_eq!(r.epsilon, 0.0);
        assert_eq!(r.e, IntervalMatrix::zeros(3, 3));
    }

    #[test]
    fn remainder_oscillator_formula() {
        let r = exp_remainder(&oscillator(), 0.01, 4).unwrap();
        let x: f64 = 4.0 * PI * 0.01;
        let expected = x.powi(5) / 120.0 / (1.0 - x / 6.0);
        assert!((r.epsilon - expected).abs() <= 1e-14 * expected);
        assert!((r.alpha - x / 6.0).abs() < 1e-16);
    }

    #[test]
    fn remainder_bounds_series_tail() {
        let a = Matrix::from_row_slice(2, 2, &[0.3, -1.2, 2.0, -0.7]);
        for &(delta, p) in &[(0.01, 1), (0.1, 4), (0.5, 2), (1.0, 6)] {
            let r = exp_remainder(&a, delta, p).unwrap();
            let ad = &a * delta;
            let mut term = Matrix::identity(2, 2);
            let mut tail = Matrix::zeros(2, 2);
            for i in 1..=p + 50 {
                term = &term * &ad / i as f64;
                if i > p {
                    tail += &term;
                }
            }
            assert!(norm_inf(&tail) <= r.epsilon, "delta {delta} p {p}");
            assert!(r.e.contains(&tail));
        }
    }

    #[test]
    fn remainder_boundary_is_rejected() {
        // ‖A‖∞ δ = 6 with p = 4 gives α = 1 exactly.
        let a = Matrix::from_row_slice(2, 2, &[0.0, 6.0, 0.0, 0.0]);
        match exp_remainder(&a, 1.0, 4) {
            Err(MatFunError::CorrectionOrder {
                alpha,
                order,
                min_order,
            }) => {
                assert_eq!(alpha, 1.0);
                assert_eq!(order, 4);
                assert_eq!(min_order, 5);
                assert!(exp_remainder(&a, 1.0, min_order).is_ok());
            }
            other => panic!("expected CorrectionOrder, got {other:?}"),
        }
    }

    #[test]
    fn correction_matrices_of_zero() {
        let delta = 0.3;
        let c = correction_matrices(&Matrix::zeros(2, 2), delta, 3).unwrap();
        assert_eq!(c.f, IntervalMatrix::zeros(2, 2));
        let id = Matrix::identity(2, 2) * delta;
        assert!(c.g.contains(&id));
        assert!((c.g.hi() - &id).amax() < 1e-15);
        assert!((c.g.lo() - &id).amax() < 1e-15);
    }

    #[test]
    fn second_order_coefficient() {
        let a = oscillator();
        let delta = 0.01;
        let c = correction_matrices(&a, delta, 2).unwrap();
        let e = exp_remainder(&a, delta, 2).unwrap();
        let a2h = &a * &a / 2.0;
        let manual =
            e.e.add(&IntervalMatrix::scalar_times(-delta * delta / 4.0, 0.0, &a2h)).unwrap();
        assert!((c.f.lo() - manual.lo()).amax() < 1e-18);
        assert!((c.f.hi() - manual.hi()).amax() < 1e-18);
    }

    #[test]
    fn interval_ops_inclusion_monotone() {
        let a = Matrix::from_row_slice(2, 2, &[1.0, -2.0, 0.5, 3.0]);
        let narrow = IntervalMatrix::new(a.add_scalar(-0.1), a.add_scalar(0.1)).unwrap();
        let wide = IntervalMatrix::new(a.add_scalar(-0.3), a.add_scalar(0.2)).unwrap();
        let m = Matrix::from_row_slice(2, 2, &[0.2, -1.0, 4.0, 0.0]);
        assert!(narrow
            .mul_point(&m)
            .unwrap()
            .is_subset_of(&wide.mul_point(&m).unwrap()));
        assert!(narrow.scale(-2.0).is_subset_of(&wide.scale(-2.0)));
        let other = IntervalMatrix::symmetric(2, 2, 0.5);
        assert!(narrow.add(&other).unwrap().is_subset_of(&wide.add(&other).unwrap()));
    }

    #[test]
    fn rejects_inverted_bounds() {
        assert!(IntervalMatrix::new(Matrix::identity(2, 2), Matrix::zeros(2, 2)).is_err());
        assert!(IntervalMatrix::new(Matrix::zeros(2, 2), Matrix::zeros(2, 3)).is_err());
    }
}
