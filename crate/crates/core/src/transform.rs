//! System transformations around discretization: homogenization, projection
//! back to the original coordinates, propagation of the discrete recurrence
//! and time-step shrinking.

use crate::discretize::{
    discretize, input_set_v, transition, DiscretizationResult, DiscretizeOptions, LinearSystem,
    Metadata, Method,
};
use crate::sets::{Ball, ConvexSet, Hyperrectangle, Norm, Zonotope};
use crate::{Error, Matrix, Result, Vector};

/// Bookkeeping needed to undo [`homogenize`].
#[derive(Debug, Clone, PartialEq)]
pub struct HomogenizationInfo {
    pub original_dim: usize,
    /// Value `α` of the auxiliary constant state.
    pub aux_value: f64,
    /// Input center `c` moved into the flow matrix.
    pub shift: Vector,
}

/// Embeds `ẋ = Ax + u, u ∈ U` into `ẏ = Cy + w, w ∈ U'` with
/// `C = [[A, c/α], [0, 0]]`, `Y₀ = X₀ × {α}` and `U' = (U − c) × {0}`, where
/// `c` is the center of the leaf set `U`.
pub fn homogenize(sys: &LinearSystem, alpha: f64) -> Result<(LinearSystem, HomogenizationInfo)> {
    if !(alpha.is_finite() && alpha != 0.0) {
        return Err(Error::InvalidArgument(format!(
            "auxiliary value must be finite and nonzero, got {alpha}"
        )));
    }
    let n = sys.dim();
    let c = sys.u().center().ok_or_else(|| Error::Inapplicable {
        method: "homogenization".into(),
        reason: format!(
            "input set {} has no well-defined center; use a box, ball, zonotope or point",
            sys.u().describe()
        ),
    })?;
    let a = sys.a();

    let mut big = Matrix::zeros(n + 1, n + 1);
    big.view_mut((0, 0), (n, n)).copy_from(a.as_ref());
    for i in 0..n {
        big[(i, n)] = c[i] / alpha;
    }
    let x0 = lift(sys.x0(), alpha)?;
    let u = lift(&translate(sys.u(), &(-&c))?, 0.0)?;
    let lifted = LinearSystem::new(big, x0, u)?;
    Ok((
        lifted,
        HomogenizationInfo {
            original_dim: n,
            aux_value: alpha,
            shift: c,
        },
    ))
}

fn translate(x: &ConvexSet, t: &Vector) -> Result<ConvexSet> {
    Ok(match x {
        ConvexSet::Singleton(p) => ConvexSet::Singleton(p + t),
        ConvexSet::Hyperrectangle(h) => Hyperrectangle::new(&h.center + t, h.radius.clone())?.into(),
        ConvexSet::Ball(b) => Ball::new(b.norm, &b.center + t, b.radius)?.into(),
        ConvexSet::Zonotope(z) => Zonotope::new(&z.center + t, z.generators.clone())?.into(),
        other => ConvexSet::sum(other.clone(), ConvexSet::singleton(t.clone())?)?,
    })
}

/// `X × {value}`.
fn lift(x: &ConvexSet, value: f64) -> Result<ConvexSet> {
    let n = x.dim();
    let extend = |v: &Vector, last: f64| {
        let mut w = Vector::zeros(n + 1);
        w.rows_mut(0, n).copy_from(v);
        w[n] = last;
        w
    };
    Ok(match x {
        ConvexSet::Singleton(p) => ConvexSet::Singleton(extend(p, value)),
        ConvexSet::Hyperrectangle(h) => {
            Hyperrectangle::new(extend(&h.center, value), extend(&h.radius, 0.0))?.into()
        }
        ConvexSet::Ball(b) if b.norm == Norm::Inf => {
            Hyperrectangle::new(extend(&b.center, value), Vector::from_fn(n + 1, |i, _| {
                if i < n {
                    b.radius
                } else {
                    0.0
                }
            }))?
            .into()
        }
        ConvexSet::Zonotope(z) => {
            let mut g = Matrix::zeros(n + 1, z.order());
            g.view_mut((0, 0), (n, z.order())).copy_from(&z.generators);
            Zonotope::new(extend(&z.center, value), g)?.into()
        }
        other => {
            let mut embed = Matrix::zeros(n + 1, n);
            embed.view_mut((0, 0), (n, n)).fill_with_identity();
            let mut e = Vector::zeros(n + 1);
            e[n] = value;
            ConvexSet::sum(ConvexSet::map(embed, other.clone())?, ConvexSet::singleton(e)?)?
        }
    })
}

/// Drops the auxiliary coordinate added by [`homogenize`].
pub fn project_out_aux(x: &ConvexSet, info: &HomogenizationInfo) -> Result<ConvexSet> {
    let n = info.original_dim;
    if x.dim() != n + 1 {
        return Err(Error::DimensionMismatch {
            expected: n + 1,
            found: x.dim(),
        });
    }
    let head = |v: &Vector| v.rows(0, n).into_owned();
    Ok(match x {
        ConvexSet::Singleton(p) => ConvexSet::Singleton(head(p)),
        ConvexSet::Hyperrectangle(h) => Hyperrectangle::new(head(&h.center), head(&h.radius))?.into(),
        ConvexSet::Zonotope(z) => Zonotope::new(
            head(&z.center),
            z.generators.rows(0, n).into_owned(),
        )?
        .remove_zero_generators()
        .into(),
        other => {
            let mut proj = Matrix::zeros(n, n + 1);
            proj.view_mut((0, 0), (n, n)).fill_with_identity();
            ConvexSet::map(proj, other.clone())?
        }
    })
}

/// `Ω₀, …, Ω_{k−1}` with `Ω_{j+1} = ΦΩ_j ⊕ 𝒱`.
pub fn propagate(phi: &Matrix, omega0: &ConvexSet, v: &ConvexSet, k: usize) -> Result<Vec<ConvexSet>> {
    if k == 0 {
        return Err(Error::InvalidArgument("propagate needs k >= 1".into()));
    }
    let n = omega0.dim();
    for found in [phi.nrows(), phi.ncols(), v.dim()] {
        if found != n {
            return Err(Error::DimensionMismatch { expected: n, found });
        }
    }
    let mut out = Vec::with_capacity(k);
    out.push(omega0.clone());
    let phi = std::sync::Arc::new(phi.clone());
    let v = std::sync::Arc::new(v.clone());
    let skip_v = v.is_origin();
    for _ in 1..k {
        let last = out.last().expect("nonempty").clone();
        let mapped = ConvexSet::map(phi.clone(), last)?;
        out.push(if skip_v {
            mapped
        } else {
            ConvexSet::sum(mapped, v.clone())?
        });
    }
    Ok(out)
}

/// Discretizes with `γ = δ/k`, propagates `k` sub-steps and returns their
/// hull as an enclosure of `ℛ_{[0,δ]}`; `Φ` and `𝒱` are those of `δ`.
pub fn shrink_time_step(
    sys: &LinearSystem,
    delta: f64,
    k: usize,
    method: &Method,
    opts: &DiscretizeOptions,
) -> Result<DiscretizationResult> {
    if k == 0 {
        return Err(Error::InvalidArgument("shrink factor k must be >= 1".into()));
    }
    if k == 1 {
        return discretize(sys, delta, method, opts);
    }
    let gamma = delta / k as f64;
    let fine = discretize(sys, gamma, method, opts)?;
    let phi_g = match &fine.phi {
        Some(p) => p.clone(),
        None => transition(sys, gamma)?,
    };
    let omega0 = ConvexSet::hull_all(propagate(&phi_g, &fine.omega0, &fine.v, k)?)?;
    let (v, input_set) = input_set_v(sys, delta)?;
    let phi = transition(sys, delta)?;
    Ok(DiscretizationResult {
        omega0,
        v,
        phi: Some(phi),
        delta,
        method: fine.method,
        metadata: Metadata {
            shrink: Some((gamma, k)),
            input_set,
            ..fine.metadata
        },
    })
}
