use super::first_order::zonotopic_x0;
use super::{
    check_delta, input_set_v, transition, DiscretizationResult, LinearSystem, Metadata, Method,
};
use crate::matfun::{correction_matrices, Norm};
use crate::sets::{interval_bounds, interval_map, zonotope_hull, Zonotope};
use crate::transform::{homogenize, project_out_aux};
use crate::{Error, Result};

/// Taylor correction hull of order `p`:
/// `Ω₀ = Z(CH(X₀, ΦX₀)) ⊕ F_p X₀ ⊕ Σᵢ (Aⁱδ^{i+1}/(i+1)!) U ⊕ Eδ U`.
///
/// The input part is accumulated term by term instead of as one `G_p U`,
/// which keeps it valid for time-varying `u(t) ∈ U` provided `0 ∈ U`. A
/// system whose `U` is not centered at the origin is first homogenized with
/// an auxiliary constant state and the result projected back; `𝒱` and `Φ`
/// are those of the original system.
pub fn correction_hull(sys: &LinearSystem, delta: f64, order: usize) -> Result<DiscretizationResult> {
    check_delta(delta)?;
    if order == 0 {
        return Err(Error::InvalidArgument(
            "correction hull needs truncation order p >= 1".into(),
        ));
    }
    let n = sys.dim();
    let (lo, hi) = interval_bounds(sys.u());
    let centered = (0..n).all(|i| lo[i] + hi[i] == 0.0);

    let (omega0, alpha, homogenized) = if centered {
        let (z, alpha) = core(sys, delta, order)?;
        (z, alpha, false)
    } else {
        let u = sys.u().to_zonotope().ok_or_else(|| inapplicable_u(sys))?;
        let (lifted, info) = homogenize(&sys.with_u(crate::sets::ConvexSet::from(u))?, 1.0)?;
        let (z, alpha) = core(&lifted, delta, order)?;
        let projected = project_out_aux(&z.into(), &info)?;
        let z = projected
            .to_zonotope()
            .expect("projection of a zonotope is a zonotope");
        (z, alpha, true)
    };

    let phi = transition(sys, delta)?;
    let (v, input_set) = input_set_v(sys, delta)?;
    Ok(DiscretizationResult {
        omega0: omega0.into(),
        v,
        phi: Some(phi),
        delta,
        method: Method::CorrectionHull { order },
        metadata: Metadata {
            norm: Norm::Inf,
            alpha: Some(alpha),
            order: Some(order),
            homogenized,
            input_set,
            ..Default::default()
        },
    })
}

fn inapplicable_u(sys: &LinearSystem) -> Error {
    Error::Inapplicable {
        method: "Correction-hull".into(),
        reason: format!("input set {} is not zonotopic", sys.u().describe()),
    }
}

fn core(sys: &LinearSystem, delta: f64, order: usize) -> Result<(Zonotope, f64)> {
    let x0 = zonotopic_x0(sys, "Correction-hull")?;
    let a = sys.a();
    let phi = transition(sys, delta)?;
    let cm = correction_matrices(a, delta, order)?;
    let mut z = zonotope_hull(&x0, &phi)?.minkowski_sum(&interval_map(&cm.f, &x0)?)?;
    if !sys.is_homogeneous() {
        let u = sys.u().to_zonotope().ok_or_else(|| inapplicable_u(sys))?;
        for g in &cm.g_terms {
            z = z.minkowski_sum(&u.linear_map(g)?)?;
        }
        z = z.minkowski_sum(&interval_map(&cm.remainder.e.scale(delta), &u)?)?;
    }
    Ok((z.remove_zero_generators(), cm.remainder.alpha))
}
