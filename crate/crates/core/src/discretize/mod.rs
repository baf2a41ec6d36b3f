//! Discretization methods: each maps `(A, X₀, U, δ)` to `Ω₀ ⊇ ℛ_{[0,δ]}`
//! plus the discrete input set `𝒱` and `Φ = e^{Aδ}`.

mod combine;
mod correction_hull;
mod first_order;
mod forward_backward;
mod method;
mod system;
mod underapprox;

pub use combine::combine_intersection;
pub use correction_hull::correction_hull;
pub use first_order::{ddt_epsilon, ddt_first_order, first_order, zonotope_first_order};
pub use forward_backward::{
    backward_only, bloat_radii, e_plus_dense, e_plus_krylov, forward_backward, forward_only,
    input_set_v, BloatRadii, ForwardBackwardTerms, KRYLOV_RADIUS_SLACK,
};
pub use method::{DiscretizationResult, DiscretizeOptions, Metadata, Method, DEFAULT_ORDER};
pub use system::{FlowMatrix, LinearSystem};
pub use underapprox::ddt_shrink_underapprox;

use crate::matfun::mat_exp;
use crate::{Error, Matrix, Result};

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if delta.is_finite() && delta > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "time step must be positive and finite, got {delta}"
        )))
    }
}

/// `Φ = e^{Aδ}`.
pub fn transition(sys: &LinearSystem, delta: f64) -> Result<Matrix> {
    check_delta(delta)?;
    Ok(mat_exp(&(sys.a().as_ref() * delta))?)
}

/// Runs `method` on `sys` with step `delta`.
pub fn discretize(
    sys: &LinearSystem,
    delta: f64,
    method: &Method,
    opts: &DiscretizeOptions,
) -> Result<DiscretizationResult> {
    method.validate()?;
    check_delta(delta)?;
    if opts.krylov.is_some() && *method != Method::ForwardOnly {
        return Err(Error::InvalidArgument(format!(
            "Krylov evaluation is only available for the forward method, not {}",
            method.label()
        )));
    }
    match method {
        Method::DdtFirstOrder => ddt_first_order(sys, delta, opts),
        Method::ZonotopeFirstOrder => zonotope_first_order(sys, delta),
        Method::CorrectionHull { order } => correction_hull(sys, delta, *order),
        Method::FirstOrder => first_order(sys, delta, opts),
        Method::ForwardBackward => forward_backward(sys, delta),
        Method::ForwardOnly => forward_only(sys, delta, opts),
        Method::BackwardOnly => backward_only(sys, delta),
        Method::Intersection(ms) => {
            let parts = ms
                .iter()
                .map(|m| discretize(sys, delta, m, opts))
                .collect::<Result<Vec<_>>>()?;
            combine_intersection(parts)
        }
    }
}
