use serde::{Deserialize, Serialize};

use super::{mat_exp, phi2, MatFunError, SparseMatrix};
use crate::{Matrix, Vector};

/// Anything that can be applied to a vector.
pub trait LinearOperator {
    fn dim(&self) -> usize;

    fn apply(&self, x: &Vector) -> Vector;

    /// Enables the Lanczos short recurrence.
    fn is_symmetric(&self) -> bool {
        false
    }
}

impl LinearOperator for Matrix {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &Vector) -> Vector {
        self * x
    }

    fn is_symmetric(&self) -> bool {
        self.is_square() && *self == self.transpose()
    }
}

impl LinearOperator for SparseMatrix {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &Vector) -> Vector {
        self.mul_vec(x)
    }

    fn is_symmetric(&self) -> bool {
        SparseMatrix::is_symmetric(self)
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn apply(&self, x: &Vector) -> Vector {
        (**self).apply(x)
    }

    fn is_symmetric(&self) -> bool {
        (**self).is_symmetric()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KrylovConfig {
    /// Maximal subspace dimension.
    pub m: usize,
    /// Relative posterior residual at which iteration may stop early; `0`
    /// always runs the full `m` steps.
    pub tol: f64,
}

impl Default for KrylovConfig {
    fn default() -> Self {
        KrylovConfig { m: 30, tol: 0.0 }
    }
}

impl KrylovConfig {
    pub fn new(m: usize, tol: f64) -> Self {
        KrylovConfig { m, tol }
    }

    pub fn validate(&self, dim: usize) -> Result<(), MatFunError> {
        if self.m == 0 {
            return Err(MatFunError::Krylov("subspace dimension must be >= 1".into()));
        }
        if self.m > dim {
            return Err(MatFunError::Krylov(format!(
                "subspace dimension {} exceeds state dimension {dim}",
                self.m
            )));
        }
        if !(self.tol >= 0.0) {
            return Err(MatFunError::Krylov(format!(
                "tolerance must be nonnegative, got {}",
                self.tol
            )));
        }
        Ok(())
    }
}

/// `A V_k = V_k H_k + h_{k+1,k} v_{k+1} e_kᵀ`.
#[derive(Debug, Clone)]
pub struct ArnoldiDecomposition {
    /// Orthonormal basis `v_1 … v_k`.
    pub basis: Vec<Vector>,
    /// `k × k` upper Hessenberg (tridiagonal for symmetric operators).
    pub h: Matrix,
    /// `‖v‖₂` of the starting vector.
    pub beta: f64,
    /// `h_{k+1,k}`; zero after a happy breakdown.
    pub h_next: f64,
}

impl ArnoldiDecomposition {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `β V_k y`.
    pub fn lift(&self, y: &Vector) -> Vector {
        let mut out = Vector::zeros(self.basis[0].len());
        for (v, &c) in self.basis.iter().zip(y.iter()) {
            out.axpy(self.beta * c, v, 1.0);
        }
        out
    }
}

struct Builder<'a, O: ?Sized> {
    op: &'a O,
    symmetric: bool,
    basis: Vec<Vector>,
    h: Vec<Vec<f64>>, // column j holds h_{0..=j+1, j}
    beta: f64,
    pending: Option<Vector>,
    h_next: f64,
    done: bool,
}

impl<'a, O: LinearOperator + ?Sized> Builder<'a, O> {
    fn new(op: &'a O, v: &Vector) -> Self {
        let beta = v.norm();
        Builder {
            op,
            symmetric: op.is_symmetric(),
            basis: vec![v / beta],
            h: Vec::new(),
            beta,
            pending: None,
            h_next: 0.0,
            done: false,
        }
    }

    /// One Arnoldi (or Lanczos) step; returns false once the basis is exhausted.
    fn step(&mut self) -> bool {
        if self.done {
            return false;
        }
        if let Some(next) = self.pending.take() {
            self.basis.push(next);
        }
        let j = self.basis.len() - 1;
        let mut w = self.op.apply(&self.basis[j]);
        let wnorm = w.norm();
        let mut col = vec![0.0; j + 2];
        let lo = if self.symmetric { j.saturating_sub(1) } else { 0 };
        for i in lo..=j {
            let c = self.basis[i].dot(&w);
            col[i] += c;
            w.axpy(-c, &self.basis[i], 1.0);
        }
        // One reorthogonalization pass against the whole basis.
        for i in 0..=j {
            let c = self.basis[i].dot(&w);
            col[i] += c;
            w.axpy(-c, &self.basis[i], 1.0);
        }
        if self.symmetric {
            // Keep H exactly tridiagonal and symmetric.
            for c in col.iter_mut().take(j.saturating_sub(1)) {
                *c = 0.0;
            }
            if j >= 1 {
                col[j - 1] = self.h[j - 1][j];
            }
        }
        let hn = w.norm();
        col[j + 1] = hn;
        self.h.push(col);
        self.h_next = hn;
        if hn <= 1e-12 * wnorm.max(f64::MIN_POSITIVE) || self.basis.len() == self.op.dim() {
            self.h_next = 0.0;
            self.done = true;
        } else {
            self.pending = Some(w / hn);
        }
        true
    }

    fn hessenberg(&self) -> Matrix {
        let k = self.h.len();
        Matrix::from_fn(k, k, |i, j| if i <= j + 1 { self.h[j][i] } else { 0.0 })
    }

    fn decomposition(self) -> ArnoldiDecomposition {
        let h = self.hessenberg();
        let k = h.nrows();
        let mut basis = self.basis;
        basis.truncate(k);
        ArnoldiDecomposition {
            basis,
            h,
            beta: self.beta,
            h_next: self.h_next,
        }
    }
}

/// Runs up to `m` Arnoldi steps on `op` starting from `v` (nonzero).
///
/// Stops early on happy breakdown, returning the invariant subspace found.
pub fn arnoldi<O: LinearOperator + ?Sized>(
    op: &O,
    v: &Vector,
    m: usize,
) -> Result<ArnoldiDecomposition, MatFunError> {
    check_start(op, v)?;
    if v.norm() == 0.0 {
        return Err(MatFunError::Krylov("starting vector is zero".into()));
    }
    let mut b = Builder::new(op, v);
    for _ in 0..m {
        if !b.step() {
            break;
        }
    }
    Ok(b.decomposition())
}

fn check_start<O: LinearOperator + ?Sized>(op: &O, v: &Vector) -> Result<(), MatFunError> {
    if v.len() != op.dim() {
        return Err(MatFunError::Shape(format!(
            "vector of length {} for operator of dimension {}",
            v.len(),
            op.dim()
        )));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(MatFunError::NonFinite);
    }
    Ok(())
}

/// Shared driver: Krylov approximation `β V_k f(H_k) e_1`, returning the
/// result and the posterior residual estimate `β h_{k+1,k} |f(H_k)_{k,1}|`.
fn krylov_apply<O, F>(
    op: &O,
    v: &Vector,
    cfg: &KrylovConfig,
    f: F,
) -> Result<(Vector, f64), MatFunError>
where
    O: LinearOperator + ?Sized,
    F: Fn(&Matrix) -> Result<Matrix, MatFunError>,
{
    cfg.validate(op.dim())?;
    check_start(op, v)?;
    let beta = v.norm();
    if beta == 0.0 {
        return Ok((Vector::zeros(v.len()), 0.0));
    }
    let mut b = Builder::new(op, v);
    let mut fh = None;
    let mut estimate = f64::INFINITY;
    for k in 1..=cfg.m {
        if !b.step() {
            break;
        }
        let check = cfg.tol > 0.0 && (k % 5 == 0) || b.done || k == cfg.m;
        if check {
            let h = b.hessenberg();
            let value = f(&h)?;
            estimate = beta * b.h_next * value[(k - 1, 0)].abs();
            fh = Some(value);
            if b.done || (cfg.tol > 0.0 && estimate <= cfg.tol * beta) {
                break;
            }
        }
    }
    let fh = fh.expect("at least one Krylov step");
    let d = b.decomposition();
    let e1 = fh.column(0).into_owned();
    Ok((d.lift(&e1), estimate))
}

/// Approximates `e^{tA} v` in a Krylov subspace of dimension at most `cfg.m`.
pub fn krylov_expv<O: LinearOperator + ?Sized>(
    op: &O,
    v: &Vector,
    t: f64,
    cfg: &KrylovConfig,
) -> Result<Vector, MatFunError> {
    Ok(krylov_expv_estimate(op, v, t, cfg)?.0)
}

/// [`krylov_expv`] together with its posterior residual estimate.
pub fn krylov_expv_estimate<O: LinearOperator + ?Sized>(
    op: &O,
    v: &Vector,
    t: f64,
    cfg: &KrylovConfig,
) -> Result<(Vector, f64), MatFunError> {
    if !t.is_finite() {
        return Err(MatFunError::InvalidStep(t));
    }
    krylov_apply(op, v, cfg, |h| mat_exp(&(h * t)))
}

/// Approximates `Φ₂(A, δ) r` for entrywise nonnegative `A` and `r`.
///
/// Round-off negatives are clamped to zero.
pub fn krylov_phi2v<O: LinearOperator + ?Sized>(
    op: &O,
    r: &Vector,
    delta: f64,
    cfg: &KrylovConfig,
) -> Result<Vector, MatFunError> {
    super::ensure_step(delta)?;
    if r.iter().any(|&x| x < 0.0) {
        return Err(MatFunError::Shape("r must be entrywise nonnegative".into()));
    }
    let (mut out, _) = krylov_apply(op, r, cfg, |h| phi2(h, delta))?;
    out.iter_mut().for_each(|x| *x = x.max(0.0));
    Ok(out)
}
