use std::sync::Arc;

use super::{
    check_delta, transition, DiscretizationResult, DiscretizeOptions, LinearSystem, Metadata,
    Method,
};
use crate::matfun::{self, krylov_expv, krylov_phi2v, phi2, KrylovConfig, Norm, SparseMatrix};
use crate::sets::{symmetric_interval_hull, ConvexSet, Hyperrectangle};
use crate::{Error, Matrix, Result, Vector};

/// Slack added to Krylov-computed radii to absorb clamped round-off.
pub const KRYLOV_RADIUS_SLACK: f64 = 1e-12;

/// Radii of the origin-centered bloating boxes
/// `E₊ = ⊡(Φ₂(|A|,δ) ⊡(A²X₀))`, `E₋ = ⊡(Φ₂(|A|,δ) ⊡(A²ΦX₀))` and
/// `E_ψ = ⊡(Φ₂(|A|,δ) ⊡(AU))`.
#[derive(Debug, Clone)]
pub struct BloatRadii {
    pub e_plus: Vector,
    pub e_minus: Vector,
    pub e_psi: Vector,
}

fn phi2_abs(sys: &LinearSystem, delta: f64) -> Result<Matrix> {
    Ok(phi2(&matfun::abs(sys.a()), delta)?)
}

fn sym_radius(m: Matrix, x: &Arc<ConvexSet>) -> Result<Vector> {
    Ok(symmetric_interval_hull(&ConvexSet::map(m, x.clone())?).radius)
}

/// All three radii with one dense `Φ₂(|A|, δ)`.
pub fn bloat_radii(sys: &LinearSystem, delta: f64, phi: &Matrix) -> Result<BloatRadii> {
    check_delta(delta)?;
    let a = sys.a();
    let p2 = phi2_abs(sys, delta)?;
    let a2 = a.as_ref() * a.as_ref();
    let e_plus = &p2 * sym_radius(a2.clone(), sys.x0())?;
    let e_minus = &p2 * sym_radius(&a2 * phi, sys.x0())?;
    let e_psi = e_psi_with(sys, &p2)?;
    Ok(BloatRadii {
        e_plus,
        e_minus,
        e_psi,
    })
}

fn e_psi_with(sys: &LinearSystem, p2: &Matrix) -> Result<Vector> {
    if sys.is_homogeneous() {
        return Ok(Vector::zeros(sys.dim()));
    }
    Ok(p2 * sym_radius(sys.a().as_ref().clone(), sys.u())?)
}

/// Radius of `E₊` through dense `Φ₂(|A|, δ)`.
pub fn e_plus_dense(sys: &LinearSystem, delta: f64) -> Result<Vector> {
    check_delta(delta)?;
    let a = sys.a();
    let p2 = phi2_abs(sys, delta)?;
    Ok(p2 * sym_radius(a.as_ref() * a.as_ref(), sys.x0())?)
}

/// Radius of `E₊` through sparse `A²` and a Krylov action of `Φ₂(|A|, δ)`.
pub fn e_plus_krylov(sys: &LinearSystem, delta: f64, cfg: &KrylovConfig) -> Result<Vector> {
    check_delta(delta)?;
    let a = sys.a_sparse();
    let a2 = a.matmul(&a)?;
    let r = sparse_sym_radius(&a2, sys.x0())?;
    krylov_radius(&a.abs(), &r, delta, cfg)
}

fn krylov_radius(
    abs_a: &SparseMatrix,
    r: &Vector,
    delta: f64,
    cfg: &KrylovConfig,
) -> Result<Vector> {
    let mut out = krylov_phi2v(abs_a, r, delta, cfg)?;
    out.iter_mut().for_each(|x| *x += KRYLOV_RADIUS_SLACK);
    Ok(out)
}

/// `⊡(M X)` radius for a sparse `M` and a concrete leaf (or sums of leaves).
fn sparse_sym_radius(m: &SparseMatrix, x: &ConvexSet) -> Result<Vector> {
    let centered = |c: &Vector, r: Vector| m.mul_vec(c).abs() + r;
    match x {
        ConvexSet::Singleton(c) => Ok(m.mul_vec(c).abs()),
        ConvexSet::Hyperrectangle(h) => Ok(centered(&h.center, m.abs().mul_vec(&h.radius))),
        ConvexSet::Ball(b) if b.norm == Norm::Inf => Ok(centered(
            &b.center,
            m.abs().mul_vec(&Vector::from_element(b.dim(), b.radius)),
        )),
        ConvexSet::Zonotope(z) => {
            let mut r = Vector::zeros(m.nrows());
            for g in z.generators.column_iter() {
                r += m.mul_vec(&g.into_owned()).abs();
            }
            Ok(centered(&z.center, r))
        }
        // ⊡ is subadditive, so summing radii stays conservative.
        ConvexSet::Sum(a, b) => Ok(sparse_sym_radius(m, a)? + sparse_sym_radius(m, b)?),
        other => Err(Error::Inapplicable {
            method: "Forward (Krylov)".into(),
            reason: format!("unsupported set {} for sparse image bounds", other.describe()),
        }),
    }
}

/// `𝒱 = δU ⊕ E_ψ`, or `{0}` when `U = {0}`.
pub fn input_set_v(sys: &LinearSystem, delta: f64) -> Result<(ConvexSet, String)> {
    check_delta(delta)?;
    if sys.is_homogeneous() {
        return Ok((ConvexSet::origin(sys.dim()), "{0}".into()));
    }
    let e = e_psi_with(sys, &phi2_abs(sys, delta)?)?;
    input_set_from(sys, delta, e)
}

fn input_set_from(sys: &LinearSystem, delta: f64, e_psi: Vector) -> Result<(ConvexSet, String)> {
    if sys.is_homogeneous() {
        return Ok((ConvexSet::origin(sys.dim()), "{0}".into()));
    }
    let v = ConvexSet::sum(
        ConvexSet::scale(delta, sys.u().clone())?,
        ConvexSet::from(Hyperrectangle::symmetric(e_psi)?),
    )?;
    Ok((v, "delta*U + E_psi".into()))
}

/// `CH(X₀, ΦX₀ ⊕ δU ⊕ E_ψ ⊕ E)` for `E` either `E₊` or `E₋`.
fn one_sided(
    sys: &LinearSystem,
    delta: f64,
    phi_x0: ConvexSet,
    e: Vector,
    e_psi: Vector,
) -> Result<ConvexSet> {
    let moved = ConvexSet::sum_all([
        phi_x0,
        ConvexSet::scale(delta, sys.u().clone())?,
        Hyperrectangle::symmetric(e_psi)?.into(),
        Hyperrectangle::symmetric(e)?.into(),
    ])?;
    Ok(ConvexSet::hull(sys.x0().clone(), moved)?)
}

/// `Ω₀ = CH(X₀, ΦX₀ ⊕ δU ⊕ E_ψ ⊕ E₊)`.
///
/// With `opts.krylov` set, `ΦX₀` becomes a support oracle evaluating
/// `e^{Aᵀδ} d` by Krylov iteration and `Φ₂(|A|, δ)` is only applied to
/// vectors. That path relies on the Krylov residual being negligible; it
/// carries no rigorous error bound.
pub fn forward_only(
    sys: &LinearSystem,
    delta: f64,
    opts: &DiscretizeOptions,
) -> Result<DiscretizationResult> {
    check_delta(delta)?;
    if let Some(cfg) = &opts.krylov {
        return forward_only_krylov(sys, delta, cfg);
    }
    let phi = transition(sys, delta)?;
    let radii = bloat_radii(sys, delta, &phi)?;
    let phi_x0 = ConvexSet::map(phi.clone(), sys.x0().clone())?;
    let omega0 = one_sided(
        sys,
        delta,
        phi_x0,
        radii.e_plus.clone(),
        radii.e_psi.clone(),
    )?;
    let (v, input_set) = input_set_from(sys, delta, radii.e_psi)?;
    Ok(DiscretizationResult {
        omega0,
        v,
        phi: Some(phi),
        delta,
        method: Method::ForwardOnly,
        metadata: Metadata {
            norm: Norm::Inf,
            input_set,
            ..Default::default()
        },
    })
}

/// `Ω₀ = CH(X₀, ΦX₀ ⊕ δU ⊕ E_ψ ⊕ E₋)`.
pub fn backward_only(sys: &LinearSystem, delta: f64) -> Result<DiscretizationResult> {
    check_delta(delta)?;
    let phi = transition(sys, delta)?;
    let radii = bloat_radii(sys, delta, &phi)?;
    let phi_x0 = ConvexSet::map(phi.clone(), sys.x0().clone())?;
    let omega0 = one_sided(
        sys,
        delta,
        phi_x0,
        radii.e_minus.clone(),
        radii.e_psi.clone(),
    )?;
    let (v, input_set) = input_set_from(sys, delta, radii.e_psi)?;
    Ok(DiscretizationResult {
        omega0,
        v,
        phi: Some(phi),
        delta,
        method: Method::BackwardOnly,
        metadata: Metadata {
            norm: Norm::Inf,
            input_set,
            ..Default::default()
        },
    })
}

fn forward_only_krylov(
    sys: &LinearSystem,
    delta: f64,
    cfg: &KrylovConfig,
) -> Result<DiscretizationResult> {
    let n = sys.dim();
    cfg.validate(n)?;
    let a = sys.a_sparse();
    let abs_a = a.abs();
    let a2 = a.matmul(&a)?;
    let e_plus = krylov_radius(&abs_a, &sparse_sym_radius(&a2, sys.x0())?, delta, cfg)?;
    let e_psi = if sys.is_homogeneous() {
        Vector::zeros(n)
    } else {
        krylov_radius(&abs_a, &sparse_sym_radius(&a, sys.u())?, delta, cfg)?
    };

    let at = Arc::new(if a.is_symmetric() {
        a.as_ref().clone()
    } else {
        a.transpose()
    });
    let x0 = sys.x0().clone();
    let cfg_c = *cfg;
    let phi_x0 = ConvexSet::oracle(n, "Krylov exp(A delta) X0", move |d: &Vector| {
        match krylov_expv(at.as_ref(), d, delta, &cfg_c) {
            Ok(w) => x0.support_unchecked(&w),
            Err(_) => f64::INFINITY,
        }
    });
    let omega0 = one_sided(sys, delta, phi_x0, e_plus, e_psi.clone())?;
    let (v, input_set) = input_set_from(sys, delta, e_psi)?;
    Ok(DiscretizationResult {
        omega0,
        v,
        phi: None,
        delta,
        method: Method::ForwardOnly,
        metadata: Metadata {
            norm: Norm::Inf,
            krylov: Some(*cfg),
            input_set,
            notes: vec!["Krylov evaluation; residual not bounded rigorously".into()],
            ..Default::default()
        },
    })
}

/// Ingredients of the forward-backward support function
/// `g(λ) = (1−λ)ρ(d,X₀) + λρ(Φᵀd,X₀) + λδρ(d,U) + Σ|dᵢ| min(λaᵢ, (1−λ)bᵢ) + λ² Σ|dᵢ|eᵢ`.
#[derive(Debug, Clone)]
pub struct ForwardBackwardTerms {
    pub x0: Arc<ConvexSet>,
    pub u: Arc<ConvexSet>,
    pub phi: Arc<Matrix>,
    pub delta: f64,
    /// `E₊`, `E₋`, `E_ψ` radii.
    pub a: Vector,
    pub b: Vector,
    pub e: Vector,
}

struct Base {
    r0: f64,
    r1: f64,
    ru: f64,
}

impl ForwardBackwardTerms {
    pub fn new(sys: &LinearSystem, delta: f64) -> Result<Self> {
        check_delta(delta)?;
        let phi = transition(sys, delta)?;
        let radii = bloat_radii(sys, delta, &phi)?;
        Ok(ForwardBackwardTerms {
            x0: sys.x0().clone(),
            u: sys.u().clone(),
            phi: Arc::new(phi),
            delta,
            a: radii.e_plus,
            b: radii.e_minus,
            e: radii.e_psi,
        })
    }

    fn base(&self, d: &Vector) -> Base {
        Base {
            r0: self.x0.support_unchecked(d),
            r1: self.x0.support_unchecked(&self.phi.tr_mul(d)),
            ru: self.u.support_unchecked(d),
        }
    }

    fn eval(&self, base: &Base, d: &Vector, lambda: f64) -> f64 {
        let mut bloat = 0.0;
        let mut quad = 0.0;
        for i in 0..d.len() {
            let w = d[i].abs();
            bloat += w * (lambda * self.a[i]).min((1.0 - lambda) * self.b[i]);
            quad += w * self.e[i];
        }
        (1.0 - lambda) * base.r0
            + lambda * base.r1
            + lambda * self.delta * base.ru
            + bloat
            + lambda * lambda * quad
    }

    /// `g(λ)` for a fixed direction.
    pub fn objective(&self, d: &Vector, lambda: f64) -> f64 {
        self.eval(&self.base(d), d, lambda)
    }

    /// `max_{λ∈[0,1]} g(λ)` and a maximizer.
    ///
    /// Between consecutive breakpoints `bᵢ/(aᵢ+bᵢ)` the objective is linear
    /// plus `λ² Σ|dᵢ|eᵢ` with a nonnegative coefficient, hence convex, so the
    /// maximum sits at a breakpoint or an endpoint.
    pub fn maximize(&self, d: &Vector) -> (f64, f64) {
        let base = self.base(d);
        let n = d.len();
        let mut quad = 0.0;
        // (λᵢ, |dᵢ|aᵢ, |dᵢ|bᵢ)
        let mut bps: Vec<(f64, f64, f64)> = Vec::with_capacity(n);
        for i in 0..n {
            let w = d[i].abs();
            quad += w * self.e[i];
            let s = self.a[i] + self.b[i];
            if w > 0.0 && s > 0.0 {
                bps.push((self.b[i] / s, w * self.a[i], w * self.b[i]));
            }
        }
        bps.sort_by(|x, y| x.0.total_cmp(&y.0));

        // Items with λᵢ > λ contribute λaᵢ, the others (1−λ)bᵢ.
        let mut s_a: f64 = bps.iter().map(|t| t.1).sum();
        let mut s_b = 0.0;
        let g = |lambda: f64, s_a: f64, s_b: f64| {
            (1.0 - lambda) * base.r0
                + lambda * base.r1
                + lambda * self.delta * base.ru
                + lambda * s_a
                + (1.0 - lambda) * s_b
                + lambda * lambda * quad
        };
        let mut best = (g(0.0, s_a, s_b), 0.0);
        let mut k = 0;
        let candidates = bps.iter().map(|t| t.0).chain(std::iter::once(1.0));
        for lambda in candidates {
            while k < bps.len() && bps[k].0 <= lambda {
                s_a -= bps[k].1;
                s_b += bps[k].2;
                k += 1;
            }
            let val = g(lambda, s_a, s_b);
            if val > best.0 {
                best = (val, lambda);
            }
        }
        best
    }

    pub fn support(&self, d: &Vector) -> f64 {
        self.maximize(d).0
    }
}

/// `Ω₀ = CH(∪_{λ∈[0,1]} 𝒴_λ)` as a support oracle with exact maximization over `λ`.
pub fn forward_backward(sys: &LinearSystem, delta: f64) -> Result<DiscretizationResult> {
    let terms = Arc::new(ForwardBackwardTerms::new(sys, delta)?);
    let phi = terms.phi.as_ref().clone();
    let (v, input_set) = input_set_from(sys, delta, terms.e.clone())?;
    let t = terms.clone();
    let omega0 = ConvexSet::oracle(sys.dim(), "forward-backward", move |d: &Vector| {
        t.support(d)
    });
    Ok(DiscretizationResult {
        omega0,
        v,
        phi: Some(phi),
        delta,
        method: Method::ForwardBackward,
        metadata: Metadata {
            norm: Norm::Inf,
            input_set,
            ..Default::default()
        },
    })
}
