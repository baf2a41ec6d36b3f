//! Matrix functions used by the discretization methods.
//!
//! Dense kernels ([`mat_exp`], [`phi2`], [`transmission_matrices`]) work on
//! [`Matrix`]; the Krylov routines act through [`LinearOperator`] so that
//! large sparse systems never materialize `e^{Aδ}` or `Φ₂`.

mod dense;
mod interval;
mod krylov;
mod sparse;

pub use dense::{
    mat_exp, phi2, phi2_block_dense, phi2_series, transmission_matrices, Transmission,
};
pub use interval::{
    correction_matrices, exp_remainder, CorrectionMatrices, IntervalMatrix, Remainder,
};
pub use krylov::{
    arnoldi, krylov_expv, krylov_expv_estimate, krylov_phi2v, ArnoldiDecomposition, KrylovConfig,
    LinearOperator,
};
pub use sparse::SparseMatrix;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::{Matrix, Vector};

#[derive(Debug, Error)]
pub enum MatFunError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("result overflowed to non-finite entries")]
    Overflow,

    #[error("time step must be positive and finite, got {0}")]
    InvalidStep(f64),

    #[error("shape mismatch: {0}")]
    Shape(String),

    /// Taylor truncation order too small for the series remainder to converge:
    /// requires `α = ‖A‖∞ δ / (p + 2) < 1`.
    #[error(
        "truncation order p = {order} violates the remainder convergence condition \
         alpha = ||A||_inf * delta / (p + 2) < 1 (alpha = {alpha}); use p >= {min_order}"
    )]
    CorrectionOrder {
        alpha: f64,
        order: usize,
        min_order: usize,
    },

    #[error("invalid Krylov configuration: {0}")]
    Krylov(String),
}

/// Vector / induced operator norm index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Norm {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
    #[default]
    #[serde(rename = "inf")]
    Inf,
}

impl Norm {
    /// Hölder conjugate: the norm whose unit ball is polar to this one.
    pub fn dual(self) -> Norm {
        match self {
            Norm::One => Norm::Inf,
            Norm::Two => Norm::Two,
            Norm::Inf => Norm::One,
        }
    }

    pub fn of_vector(self, v: &Vector) -> f64 {
        match self {
            Norm::One => v.iter().map(|x| x.abs()).sum(),
            Norm::Two => v.norm(),
            Norm::Inf => v.amax(),
        }
    }

    /// Induced operator norm.
    pub fn of_matrix(self, m: &Matrix) -> f64 {
        match self {
            Norm::One => norm_one(m),
            Norm::Inf => norm_inf(m),
            Norm::Two => {
                if m.is_empty() {
                    0.0
                } else {
                    m.clone().singular_values().max()
                }
            }
        }
    }
}

impl std::fmt::Display for Norm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Norm::One => "1",
            Norm::Two => "2",
            Norm::Inf => "inf",
        })
    }
}

impl std::str::FromStr for Norm {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "1" => Ok(Norm::One),
            "2" => Ok(Norm::Two),
            "inf" | "Inf" | "infinity" => Ok(Norm::Inf),
            other => Err(format!("unsupported norm {other:?}; expected 1, 2 or inf")),
        }
    }
}

/// Maximum absolute row sum.
pub fn norm_inf(m: &Matrix) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Maximum absolute column sum.
pub fn norm_one(m: &Matrix) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Entrywise absolute value `|M|`.
pub fn abs(m: &Matrix) -> Matrix {
    m.map(f64::abs)
}

pub(crate) fn ensure_square(m: &Matrix) -> Result<usize, MatFunError> {
    if m.nrows() != m.ncols() {
        return Err(MatFunError::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(MatFunError::NonFinite);
    }
    Ok(m.nrows())
}

pub(crate) fn ensure_step(delta: f64) -> Result<(), MatFunError> {
    if delta > 0.0 && delta.is_finite() {
        Ok(())
    } else {
        Err(MatFunError::InvalidStep(delta))
    }
}

/// `e^x - 1 - x`, accurate for small `x ≥ 0`.
pub fn exp_excess(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        // Taylor tail from x^2/2; terms beyond x^7 are below one ulp for |x| < 1e-3.
        let mut term = x * x / 2.0;
        let mut sum = term;
        for k in 3..=8 {
            term *= x / k as f64;
            sum += term;
        }
        sum
    } else {
        x.exp_m1() - x
    }
}

/// `(e^x - 1 - x) / x`, extended continuously by `0` at `x = 0`.
pub fn exp_excess_ratio(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        let mut term = x / 2.0;
        let mut sum = term;
        for k in 3..=9 {
            term *= x / k as f64;
            sum += term;
        }
        sum
    } else {
        exp_excess(x) / x
    }
}
