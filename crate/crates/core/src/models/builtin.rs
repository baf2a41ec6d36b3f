use std::f64::consts::PI;

use super::{Benchmark, ModelError};
use crate::discretize::LinearSystem;
use crate::matfun::SparseMatrix;
use crate::sets::{ConvexSet, Hyperrectangle, Norm, Zonotope};
use crate::{Matrix, Result, Vector};

/// Harmonic oscillator `x' = [[0, 1], [−4π, 0]] x + (0, f)`,
/// `f ∈ [f_center − f_radius, f_center + f_radius]`, `X₀ = B∞([0, 10], 0.1)`.
///
/// `U` is `{0}` when both parameters vanish and a point when only the
/// radius does.
pub fn oscillator(f_center: f64, f_radius: f64) -> Result<LinearSystem> {
    if !(f_radius >= 0.0 && f_radius.is_finite()) || !f_center.is_finite() {
        return Err(ModelError::InvalidParameter(format!(
            "forcing radius must be finite and nonnegative, got center {f_center}, radius {f_radius}"
        ))
        .into());
    }
    let a = Matrix::from_row_slice(2, 2, &[0.0, 1.0, -4.0 * PI, 0.0]);
    let x0 = ConvexSet::ball(Norm::Inf, Vector::from_column_slice(&[0.0, 10.0]), 0.1)?;
    let u = if f_center == 0.0 && f_radius == 0.0 {
        ConvexSet::origin(2)
    } else if f_radius == 0.0 {
        ConvexSet::singleton(Vector::from_column_slice(&[0.0, f_center]))?
    } else {
        ConvexSet::hyperrectangle(
            Vector::from_column_slice(&[0.0, f_center]),
            Vector::from_column_slice(&[0.0, f_radius]),
        )?
    };
    LinearSystem::new(a, x0, u)
}

/// Two-mass, two-spring chain with `m₁ = m₂ = k₂ = 1` and `k₁ = 10⁴`.
pub fn tdof() -> Result<LinearSystem> {
    let (k1, k2, m1, m2) = (1e4, 1.0, 1.0, 1.0);
    #[rustfmt::skip]
    let a = Matrix::from_row_slice(4, 4, &[
        0.0, 0.0, 1.0, 0.0,
        0.0, 0.0, 0.0, 1.0,
        -(k1 + k2) / m1, k2 / m1, 0.0, 0.0,
        k2 / m2, -k2 / m2, 0.0, 0.0,
    ]);
    let x0 = ConvexSet::hyperrectangle(
        Vector::from_column_slice(&[1.0, 10.0, 0.0, 0.0]),
        Vector::from_column_slice(&[0.1, 0.5, 0.5, 0.5]),
    )?;
    LinearSystem::homogeneous(a, x0)
}

fn heat_index(n: usize, i: usize, j: usize, k: usize) -> usize {
    i + n * (j + n * k)
}

/// Linear index of the center mesh point (rounded down for even `n`).
pub fn heat3d_center_index(n: usize) -> usize {
    let c = n / 2;
    heat_index(n, c, c, c)
}

/// Heat equation on the unit cube, `n³` interior mesh points, 7-point
/// Laplacian with spacing `h = 1/(n+1)`, unit diffusivity and zero Dirichlet
/// boundary. The edge `i = j = 0` starts in `[0.9, 1.1]`, all other points
/// at 0. Canonical stand-in; the original benchmark's exact data differ.
pub fn heat3d(n: usize) -> Result<LinearSystem> {
    if n < 2 {
        return Err(ModelError::InvalidParameter(format!("heat3d needs n >= 2, got {n}")).into());
    }
    let dim = n * n * n;
    let h = 1.0 / (n + 1) as f64;
    let s = 1.0 / (h * h);
    let mut trip = Vec::with_capacity(7 * dim);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                let row = heat_index(n, i, j, k);
                trip.push((row, row, -6.0 * s));
                let mut link = |ii: usize, jj: usize, kk: usize| {
                    trip.push((row, heat_index(n, ii, jj, kk), s));
                };
                if i > 0 {
                    link(i - 1, j, k);
                }
                if i + 1 < n {
                    link(i + 1, j, k);
                }
                if j > 0 {
                    link(i, j - 1, k);
                }
                if j + 1 < n {
                    link(i, j + 1, k);
                }
                if k > 0 {
                    link(i, j, k - 1);
                }
                if k + 1 < n {
                    link(i, j, k + 1);
                }
            }
        }
    }
    let a = SparseMatrix::from_triplets(dim, dim, trip)?;
    let mut center = Vector::zeros(dim);
    let mut radius = Vector::zeros(dim);
    for k in 0..n {
        let idx = heat_index(n, 0, 0, k);
        center[idx] = 1.0;
        radius[idx] = 0.1;
    }
    let x0 = ConvexSet::hyperrectangle(center, radius)?;
    LinearSystem::from_sparse(a, x0, ConvexSet::origin(dim))
}

/// State dimension of the ISS stand-in.
pub const ISS_DIM: usize = 270;
const ISS_DOF: usize = ISS_DIM / 2;
const ISS_STIFFNESS: f64 = 940.0;
const ISS_DAMPING: f64 = 2e-3;
/// Degrees of freedom driven by the three inputs.
pub(super) const ISS_INPUT_DOF: [usize; 3] = [0, ISS_DOF / 2, ISS_DOF - 1];

/// Flow matrix, 3-dim input box and input map of the ISS stand-in.
pub(super) fn iss_parts() -> Result<(SparseMatrix, Hyperrectangle, Hyperrectangle, Matrix)> {
    // Fixed-fixed spring chain K = k·tridiag(−1, 2, −1), diagonal damping
    // D = c·diag(K), A = [[0, I], [−K, −D]]. Lower-block row sums reach 2k(2+c).
    let m = ISS_DOF;
    let mut trip = Vec::new();
    for i in 0..m {
        trip.push((i, m + i, 1.0));
        trip.push((m + i, i, -2.0 * ISS_STIFFNESS));
        trip.push((m + i, m + i, -ISS_DAMPING * 2.0 * ISS_STIFFNESS));
        if i > 0 {
            trip.push((m + i, i - 1, ISS_STIFFNESS));
        }
        if i + 1 < m {
            trip.push((m + i, i + 1, ISS_STIFFNESS));
        }
    }
    let a = SparseMatrix::from_triplets(ISS_DIM, ISS_DIM, trip)?;
    let x0 = Hyperrectangle::symmetric(Vector::from_element(ISS_DIM, 1e-4))?;
    let u = Hyperrectangle::new(
        Vector::from_column_slice(&[0.05, 0.9, 0.94]),
        Vector::from_column_slice(&[0.05, 0.1, 0.04]),
    )?;
    let mut b = Matrix::zeros(ISS_DIM, 3);
    for (col, dof) in ISS_INPUT_DOF.iter().enumerate() {
        b[(m + dof, col)] = 1.0;
    }
    Ok((a, x0, u, b))
}

/// Synthetic 270-dimensional sparse stand-in for the ISS model: a damped
/// spring chain with `‖A‖∞ ≈ 3763`, `X₀ = B∞(0, 10⁻⁴)` and three bounded
/// inputs acting on velocities. The reference direction reads the position
/// of the middle degree of freedom.
pub fn iss_synthetic() -> Result<Benchmark> {
    let (a, x0, u, b) = iss_parts()?;
    let bu = Zonotope::from_box(u.center.clone(), &u.radius).linear_map(&b)?;
    let system = LinearSystem::from_sparse(a, ConvexSet::from(x0), ConvexSet::from(bu))?;
    let mut direction = Vector::zeros(ISS_DIM);
    direction[ISS_INPUT_DOF[1]] = 1.0;
    Ok(Benchmark {
        name: "iss".into(),
        system,
        delta: 1e-3,
        direction,
    })
}
