use super::{
    check_delta, input_set_v, transition, DiscretizationResult, DiscretizeOptions, LinearSystem,
    Metadata, Method,
};
use crate::matfun::{exp_excess, exp_excess_ratio, Norm};
use crate::sets::{set_norm, zonotope_hull, ConvexSet, Zonotope};
use crate::{Error, Result, Vector};

/// Bloating radius of the d/dt method,
/// `ε = ‖X₀‖ (e^{‖A‖δ} − 1 − ‖A‖δ − (3/8)‖A‖²δ²)`, and whether it was clamped at 0.
///
/// Since `e^x − 1 − x ≥ x²/2 > 3x²/8` the clamp is never active for finite
/// inputs; it stays as a guard.
pub fn ddt_epsilon(sys: &LinearSystem, delta: f64, norm: Norm) -> Result<(f64, bool)> {
    let x = norm.of_matrix(sys.a()) * delta;
    let x0 = set_norm(sys.x0(), norm)?;
    let eps = x0 * (exp_excess(x) - 0.375 * x * x);
    if eps < 0.0 {
        Ok((0.0, true))
    } else {
        Ok((eps, false))
    }
}

fn require_homogeneous(sys: &LinearSystem, method: &str) -> Result<()> {
    if sys.is_homogeneous() {
        Ok(())
    } else {
        Err(Error::Inapplicable {
            method: method.into(),
            reason: "only homogeneous systems (U = {0}) are supported; \
                     homogenize the system or choose another method"
                .into(),
        })
    }
}

/// `Ω₀ = CH(X₀, ΦX₀) ⊕ B_ε`, homogeneous systems only.
pub fn ddt_first_order(
    sys: &LinearSystem,
    delta: f64,
    opts: &DiscretizeOptions,
) -> Result<DiscretizationResult> {
    check_delta(delta)?;
    require_homogeneous(sys, "d-dt")?;
    let n = sys.dim();
    let phi = transition(sys, delta)?;
    let (eps, clamped) = ddt_epsilon(sys, delta, opts.norm)?;
    let image = ConvexSet::map(phi.clone(), sys.x0().clone())?;
    let omega0 = ConvexSet::sum(
        ConvexSet::hull(sys.x0().clone(), image)?,
        ConvexSet::ball(opts.norm, Vector::zeros(n), eps)?,
    )?;
    let mut notes = Vec::new();
    if clamped {
        notes.push("negative d/dt radius clamped to zero".into());
    }
    Ok(DiscretizationResult {
        omega0,
        v: ConvexSet::origin(n),
        phi: Some(phi),
        delta,
        method: Method::DdtFirstOrder,
        metadata: Metadata {
            norm: opts.norm,
            epsilon: Some(eps),
            epsilon_clamped: clamped,
            input_set: "{0}".into(),
            notes,
            ..Default::default()
        },
    })
}

/// `ε = (e^{‖A‖δ} − 1 − ‖A‖δ)(‖X₀‖ + ‖U‖/‖A‖)`, with the `‖U‖/‖A‖` product
/// evaluated as `δ‖U‖ (e^x − 1 − x)/x` so that `A = 0` needs no special case.
fn first_order_epsilon(sys: &LinearSystem, delta: f64, norm: Norm) -> Result<(f64, f64)> {
    let x = norm.of_matrix(sys.a()) * delta;
    let x0 = set_norm(sys.x0(), norm)?;
    let u = set_norm(sys.u(), norm)?;
    Ok((exp_excess(x) * x0 + delta * u * exp_excess_ratio(x), u))
}

/// Concrete zonotope `Z(CH(X₀, ΦX₀)) ⊕ B^∞_ε` with
/// `ε = (e^{‖A‖δ} − 1 − ‖A‖δ)(‖X₀‖ + ‖U‖/‖A‖) + δ‖U‖` in ∞-norms.
pub fn zonotope_first_order(sys: &LinearSystem, delta: f64) -> Result<DiscretizationResult> {
    check_delta(delta)?;
    let x0 = zonotopic_x0(sys, "Zonotope")?;
    let n = sys.dim();
    let phi = transition(sys, delta)?;
    let (eps_curv, u_norm) = first_order_epsilon(sys, delta, Norm::Inf)?;
    let eps = eps_curv + delta * u_norm;
    let hull = zonotope_hull(&x0, &phi)?;
    let omega0 = hull.minkowski_sum(&Zonotope::from_box(
        Vector::zeros(n),
        &Vector::from_element(n, eps),
    ))?;
    let (v, input_set) = input_set_v(sys, delta)?;
    Ok(DiscretizationResult {
        omega0: omega0.into(),
        v,
        phi: Some(phi),
        delta,
        method: Method::ZonotopeFirstOrder,
        metadata: Metadata {
            norm: Norm::Inf,
            epsilon: Some(eps),
            input_set,
            ..Default::default()
        },
    })
}

/// `Ω₀ = CH(X₀, ΦX₀ ⊕ δU ⊕ B_ε)`.
pub fn first_order(
    sys: &LinearSystem,
    delta: f64,
    opts: &DiscretizeOptions,
) -> Result<DiscretizationResult> {
    check_delta(delta)?;
    let n = sys.dim();
    let phi = transition(sys, delta)?;
    let (eps, _) = first_order_epsilon(sys, delta, opts.norm)?;
    let image = ConvexSet::map(phi.clone(), sys.x0().clone())?;
    let moved = ConvexSet::sum_all([
        image,
        ConvexSet::scale(delta, sys.u().clone())?,
        ConvexSet::ball(opts.norm, Vector::zeros(n), eps)?,
    ])?;
    let omega0 = ConvexSet::hull(sys.x0().clone(), moved)?;
    let (v, input_set) = input_set_v(sys, delta)?;
    Ok(DiscretizationResult {
        omega0,
        v,
        phi: Some(phi),
        delta,
        method: Method::FirstOrder,
        metadata: Metadata {
            norm: opts.norm,
            epsilon: Some(eps),
            input_set,
            ..Default::default()
        },
    })
}

pub(super) fn zonotopic_x0(sys: &LinearSystem, method: &str) -> Result<Zonotope> {
    sys.x0().to_zonotope().ok_or_else(|| Error::Inapplicable {
        method: method.into(),
        reason: format!(
            "initial set {} is not zonotopic; convert it explicitly (e.g. box_approximation)",
            sys.x0().describe()
        ),
    })
}
