use super::MatFunError;
use crate::{Matrix, Vector};

/// Compressed sparse row matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds from `(row, col, value)` triplets; duplicates are summed and
    /// explicit zeros dropped.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        mut triplets: Vec<(usize, usize, f64)>,
    ) -> Result<Self, MatFunError> {
        if let Some(&(i, j, _)) = triplets.iter().find(|(i, j, _)| *i >= nrows || *j >= ncols) {
            return Err(MatFunError::Shape(format!(
                "entry ({i}, {j}) outside {nrows}x{ncols}"
            )));
        }
        if triplets.iter().any(|t| !t.2.is_finite()) {
            return Err(MatFunError::NonFinite);
        }
        triplets.sort_by_key(|&(i, j, _)| (i, j));
        let mut indptr = vec![0; nrows + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in triplets {
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(j);
                values.push(v);
                indptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..nrows {
            indptr[i + 1] += indptr[i];
        }
        let mut m = SparseMatrix {
            nrows,
            ncols,
            indptr,
            indices,
            values,
        };
        m.drop_zeros();
        Ok(m)
    }

    pub fn from_dense(m: &Matrix) -> Self {
        let mut trip = Vec::new();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                if m[(i, j)] != 0.0 {
                    trip.push((i, j, m[(i, j)]));
                }
            }
        }
        Self::from_triplets(m.nrows(), m.ncols(), trip).expect("dense entries are in range")
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            nrows: n,
            ncols: n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    fn drop_zeros(&mut self) {
        if self.values.iter().all(|&v| v != 0.0) {
            return;
        }
        let mut indptr = vec![0; self.nrows + 1];
        let mut indices = Vec::with_capacity(self.indices.len());
        let mut values = Vec::with_capacity(self.values.len());
        for i in 0..self.nrows {
            for k in self.indptr[i]..self.indptr[i + 1] {
                if self.values[k] != 0.0 {
                    indices.push(self.indices[k]);
                    values.push(self.values[k]);
                }
            }
            indptr[i + 1] = indices.len();
        }
        self.indptr = indptr;
        self.indices = indices;
        self.values = values;
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Fraction of entries that are structurally zero.
    pub fn sparsity(&self) -> f64 {
        let total = (self.nrows * self.ncols) as f64;
        if total == 0.0 {
            0.0
        } else {
            1.0 - self.nnz() as f64 / total
        }
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.indptr[i]..self.indptr[i + 1];
        self.indices[r.clone()]
            .iter()
            .copied()
            .zip(self.values[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.indptr[i]..self.indptr[i + 1];
        match self.indices[r.clone()].binary_search(&j) {
            Ok(k) => self.values[r.start + k],
            Err(_) => 0.0,
        }
    }

    /// Row-major triplets.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = Matrix::zeros(self.nrows, self.ncols);
        for (i, j, v) in self.triplets() {
            m[(i, j)] = v;
        }
        m
    }

    pub fn transpose(&self) -> SparseMatrix {
        let trip = self.triplets().map(|(i, j, v)| (j, i, v)).collect();
        Self::from_triplets(self.ncols, self.nrows, trip).expect("transposed entries in range")
    }

    pub fn abs(&self) -> SparseMatrix {
        let mut m = self.clone();
        m.values.iter_mut().for_each(|v| *v = v.abs());
        m
    }

    pub fn scale(&self, c: f64) -> SparseMatrix {
        let mut m = self.clone();
        m.values.iter_mut().for_each(|v| *v *= c);
        m.drop_zeros();
        m
    }

    pub fn mul_vec(&self, x: &Vector) -> Vector {
        assert_eq!(x.len(), self.ncols, "sparse matvec dimension mismatch");
        let mut y = Vector::zeros(self.nrows);
        self.mul_vec_into(x, &mut y);
        y
    }

    pub(crate) fn mul_vec_into(&self, x: &Vector, y: &mut Vector) {
        for i in 0..self.nrows {
            y[i] = self.row(i).map(|(j, v)| v * x[j]).sum();
        }
    }

    /// Sparse product `self · other`.
    pub fn matmul(&self, other: &SparseMatrix) -> Result<SparseMatrix, MatFunError> {
        if self.ncols != other.nrows {
            return Err(MatFunError::Shape(format!(
                "{}x{} times {}x{}",
                self.nrows, self.ncols, other.nrows, other.ncols
            )));
        }
        let mut acc = vec![0.0; other.ncols];
        let mut mark = vec![usize::MAX; other.ncols];
        let mut indptr = vec![0; self.nrows + 1];
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for i in 0..self.nrows {
            let start = indices.len();
            for (k, a) in self.row(i) {
                for (j, b) in other.row(k) {
                    if mark[j] != i {
                        mark[j] = i;
                        indices.push(j);
                        acc[j] = 0.0;
                    }
                    acc[j] += a * b;
                }
            }
            indices[start..].sort_unstable();
            for &j in &indices[start..] {
                values.push(acc[j]);
            }
            indptr[i + 1] = indices.len();
        }
        let mut m = SparseMatrix {
            nrows: self.nrows,
            ncols: other.ncols,
            indptr,
            indices,
            values,
        };
        m.drop_zeros();
        Ok(m)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.nrows)
            .map(|i| self.row(i).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Exact structural and numerical symmetry.
    pub fn is_symmetric(&self) -> bool {
        self.nrows == self.ncols && self.triplets().all(|(i, j, v)| self.get(j, i) == v)
    }
}
