use std::sync::{Arc, OnceLock};

use crate::matfun::SparseMatrix;
use crate::sets::{interval_bounds, ConvexSet};
use crate::{Error, Matrix, Result};

/// Storage of the flow matrix `A`.
#[derive(Debug, Clone)]
pub enum FlowMatrix {
    Dense(Arc<Matrix>),
    Sparse(Arc<SparseMatrix>),
}

/// `x'(t) = A x(t) + u(t)`, `x(0) ∈ X₀`, `u(t) ∈ U`.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    a: FlowMatrix,
    dense: OnceLock<Arc<Matrix>>,
    x0: Arc<ConvexSet>,
    u: Arc<ConvexSet>,
}

impl LinearSystem {
    pub fn new(
        a: Matrix,
        x0: impl Into<Arc<ConvexSet>>,
        u: impl Into<Arc<ConvexSet>>,
    ) -> Result<Self> {
        let a = Arc::new(a);
        if a.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("flow matrix has non-finite entries".into()));
        }
        let sys = LinearSystem {
            dense: OnceLock::from(a.clone()),
            a: FlowMatrix::Dense(a),
            x0: x0.into(),
            u: u.into(),
        };
        sys.validate()?;
        Ok(sys)
    }

    pub fn from_sparse(
        a: SparseMatrix,
        x0: impl Into<Arc<ConvexSet>>,
        u: impl Into<Arc<ConvexSet>>,
    ) -> Result<Self> {
        let sys = LinearSystem {
            a: FlowMatrix::Sparse(Arc::new(a)),
            dense: OnceLock::new(),
            x0: x0.into(),
            u: u.into(),
        };
        sys.validate()?;
        Ok(sys)
    }

    /// Homogeneous system with `U = {0}`.
    pub fn homogeneous(a: Matrix, x0: impl Into<Arc<ConvexSet>>) -> Result<Self> {
        let n = a.nrows();
        Self::new(a, x0, ConvexSet::origin(n))
    }

    fn validate(&self) -> Result<()> {
        let (r, c) = match &self.a {
            FlowMatrix::Dense(m) => m.shape(),
            FlowMatrix::Sparse(s) => (s.nrows(), s.ncols()),
        };
        if r != c {
            return Err(Error::InvalidArgument(format!(
                "flow matrix must be square, got {r}x{c}"
            )));
        }
        for set in [&self.x0, &self.u] {
            if set.dim() != r {
                return Err(Error::DimensionMismatch {
                    expected: r,
                    found: set.dim(),
                });
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.x0.dim()
    }

    pub fn flow(&self) -> &FlowMatrix {
        &self.a
    }

    /// Dense `A`, materialized once for sparse systems.
    pub fn a(&self) -> &Arc<Matrix> {
        self.dense.get_or_init(|| match &self.a {
            FlowMatrix::Dense(m) => m.clone(),
            FlowMatrix::Sparse(s) => Arc::new(s.to_dense()),
        })
    }

    /// Sparse `A`, converted on the fly for dense systems.
    pub fn a_sparse(&self) -> Arc<SparseMatrix> {
        match &self.a {
            FlowMatrix::Sparse(s) => s.clone(),
            FlowMatrix::Dense(m) => Arc::new(SparseMatrix::from_dense(m)),
        }
    }

    pub fn x0(&self) -> &Arc<ConvexSet> {
        &self.x0
    }

    pub fn u(&self) -> &Arc<ConvexSet> {
        &self.u
    }

    pub fn with_x0(&self, x0: impl Into<Arc<ConvexSet>>) -> Result<Self> {
        let sys = LinearSystem {
            x0: x0.into(),
            ..self.clone()
        };
        sys.validate()?;
        Ok(sys)
    }

    pub fn with_u(&self, u: impl Into<Arc<ConvexSet>>) -> Result<Self> {
        let sys = LinearSystem {
            u: u.into(),
            ..self.clone()
        };
        sys.validate()?;
        Ok(sys)
    }

    /// `U = {0}`.
    pub fn is_homogeneous(&self) -> bool {
        if self.u.is_origin() {
            return true;
        }
        let (lo, hi) = interval_bounds(&self.u);
        lo.iter().chain(hi.iter()).all(|&x| x == 0.0)
    }
}
