use super::first_order::ddt_epsilon;
use super::{check_delta, transition, LinearSystem};
use crate::matfun::Norm;
use crate::sets::ConvexSet;
use crate::{Error, Result};

/// `CH(X₀, ΦX₀) ⊖ B^∞_ε` with the d/dt radius `ε`, as a support oracle
/// `max(ρ(d,X₀), ρ(Φᵀd,X₀)) − ε‖d‖₁`.
///
/// This shrinks instead of bloats and is *not* an enclosure of the reachable
/// states on `[0, δ]`; it exists to exhibit that failure (see
/// [`crate::audit::find_unreachable_point`]). The returned function need not
/// be a valid support function when the shrink exceeds the hull.
pub fn ddt_shrink_underapprox(sys: &LinearSystem, delta: f64) -> Result<ConvexSet> {
    check_delta(delta)?;
    if !sys.is_homogeneous() {
        return Err(Error::Inapplicable {
            method: "d-dt underapproximation".into(),
            reason: "only homogeneous systems are supported".into(),
        });
    }
    let phi = transition(sys, delta)?;
    let (eps, _) = ddt_epsilon(sys, delta, Norm::Inf)?;
    let x0 = sys.x0().clone();
    Ok(ConvexSet::oracle(
        sys.dim(),
        "d-dt shrunk hull",
        move |d| {
            let hull = x0.support_unchecked(d).max(x0.support_unchecked(&phi.tr_mul(d)));
            hull - eps * d.lp_norm(1)
        },
    ))
}
