use super::{ConvexSet, Hyperrectangle, SetError, SetResult, Zonotope};
use crate::matfun::Norm;
use crate::{Matrix, Vector};

/// Per-coordinate extrema `(lo, hi)` with `loᵢ = −ρ(−eᵢ, X)` and `hiᵢ = ρ(eᵢ, X)`.
///
/// Evaluated structurally where the node allows it; every rule is exact.
pub fn interval_bounds(x: &ConvexSet) -> (Vector, Vector) {
    match x {
        ConvexSet::Singleton(p) => (p.clone(), p.clone()),
        ConvexSet::Hyperrectangle(h) => (h.low(), h.high()),
        ConvexSet::Ball(b) => (b.center.add_scalar(-b.radius), b.center.add_scalar(b.radius)),
        ConvexSet::Zonotope(z) => {
            let r = z.abs_generator_sum();
            (&z.center - &r, &z.center + &r)
        }
        ConvexSet::Sum(a, b) => {
            let (la, ha) = interval_bounds(a);
            let (lb, hb) = interval_bounds(b);
            (la + lb, ha + hb)
        }
        ConvexSet::Hull(a, b) => {
            let (la, ha) = interval_bounds(a);
            let (lb, hb) = interval_bounds(b);
            (la.inf(&lb), ha.sup(&hb))
        }
        ConvexSet::Scale(c, y) => {
            let (l, h) = interval_bounds(y);
            if *c >= 0.0 {
                (l * *c, h * *c)
            } else {
                (h * *c, l * *c)
            }
        }
        ConvexSet::Map(m, y) => map_bounds(m, y),
        ConvexSet::Oracle(_) => axis_supports(x),
    }
}

fn map_bounds(m: &Matrix, y: &ConvexSet) -> (Vector, Vector) {
    let centered = |c: Vector, r: Vector| (&c - &r, c + r);
    match y {
        ConvexSet::Singleton(p) => {
            let c = m * p;
            (c.clone(), c)
        }
        ConvexSet::Hyperrectangle(h) => centered(m * &h.center, m.abs() * &h.radius),
        ConvexSet::Ball(b) if b.norm == Norm::Inf => centered(
            m * &b.center,
            m.abs() * Vector::from_element(b.dim(), b.radius),
        ),
        ConvexSet::Zonotope(z) => {
            let mz = Zonotope {
                center: m * &z.center,
                generators: m * &z.generators,
            };
            centered(mz.center.clone(), mz.abs_generator_sum())
        }
        _ => {
            let n = m.nrows();
            let mut lo = Vector::zeros(n);
            let mut hi = Vector::zeros(n);
            for i in 0..n {
                let row = m.row(i).transpose();
                hi[i] = y.support_unchecked(&row);
                lo[i] = -y.support_unchecked(&(-row));
            }
            (lo, hi)
        }
    }
}

fn axis_supports(x: &ConvexSet) -> (Vector, Vector) {
    let n = x.dim();
    let mut lo = Vector::zeros(n);
    let mut hi = Vector::zeros(n);
    let mut e = Vector::zeros(n);
    for i in 0..n {
        e[i] = 1.0;
        hi[i] = x.support_unchecked(&e);
        e[i] = -1.0;
        lo[i] = -x.support_unchecked(&e);
        e[i] = 0.0;
    }
    (lo, hi)
}

/// Tight axis-aligned box enclosing `X`.
pub fn box_approximation(x: &ConvexSet) -> Hyperrectangle {
    let (lo, hi) = interval_bounds(x);
    let center = (&lo + &hi) * 0.5;
    // Round the radius up so the box still covers both extrema.
    let radius = Vector::from_fn(lo.len(), |i, _| {
        let r = (hi[i] - center[i]).max(center[i] - lo[i]).max(0.0);
        if r == 0.0 {
            0.0
        } else {
            r.next_up()
        }
    });
    Hyperrectangle { center, radius }
}

/// Smallest origin-symmetric box containing `X` (the `⊡` operator).
pub fn symmetric_interval_hull(x: &ConvexSet) -> Hyperrectangle {
    let (lo, hi) = interval_bounds(x);
    let radius = lo.abs().sup(&hi.abs());
    Hyperrectangle {
        center: Vector::zeros(radius.len()),
        radius,
    }
}

/// Origin box with radius `min(λaᵢ, (1 − λ)bᵢ)`, i.e. `λE₊ ∩ (1 − λ)E₋`.
pub fn scaled_box_intersection(a: &Vector, b: &Vector, lambda: f64) -> SetResult<Hyperrectangle> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(SetError::InvalidArgument(format!(
            "lambda must lie in [0, 1], got {lambda}"
        )));
    }
    if a.len() != b.len() {
        return Err(SetError::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let radius = (a * lambda).inf(&(b * (1.0 - lambda)));
    Hyperrectangle::symmetric(radius)
}

const ENUMERATION_LIMIT: usize = 16;

/// `‖X‖_p = sup_{x∈X} ‖x‖_p`.
///
/// Exact for every leaf within the enumeration limit; lazy nodes support
/// `p = ∞` only.
pub fn set_norm(x: &ConvexSet, p: Norm) -> SetResult<f64> {
    if p == Norm::Inf {
        let (lo, hi) = interval_bounds(x);
        return Ok(lo.abs().sup(&hi.abs()).amax());
    }
    match x {
        ConvexSet::Singleton(c) => Ok(p.of_vector(c)),
        ConvexSet::Hyperrectangle(h) => Ok(p.of_vector(&(h.center.abs() + &h.radius))),
        ConvexSet::Ball(b) => Ok(ball_norm(&b.center, b.radius, b.norm, p)),
        ConvexSet::Zonotope(z) => zonotope_norm(z, p),
        _ => Err(SetError::Unsupported(format!(
            "{p}-norm of a lazy set; only the inf-norm is available"
        ))),
    }
}

fn ball_norm(c: &Vector, r: f64, ball: Norm, p: Norm) -> f64 {
    let n = c.len() as f64;
    match (ball, p) {
        (q, p) if q == p => p.of_vector(c) + r,
        (Norm::Inf, p) => p.of_vector(&c.abs().add_scalar(r)),
        (_, Norm::Inf) => c.amax() + r,
        // 1-ball measured in 2-norm: convex, maximized at a vertex c ± r eᵢ.
        (Norm::One, Norm::Two) => {
            let base = c.norm_squared();
            c.iter()
                .map(|&ci| (base - ci * ci + (ci.abs() + r).powi(2)).sqrt())
                .fold(0.0, f64::max)
        }
        // 2-ball measured in 1-norm: max over sign vectors s of s·c + r‖s‖₂.
        (Norm::Two, Norm::One) => Norm::One.of_vector(c) + r * n.sqrt(),
        _ => unreachable!("all norm pairs covered"),
    }
}

fn zonotope_norm(z: &Zonotope, p: Norm) -> SetResult<f64> {
    let z = z.remove_zero_generators();
    let (n, m) = (z.dim(), z.order());
    if m <= ENUMERATION_LIMIT {
        // The norm is convex, so its maximum is attained at a vertex.
        let mut best: f64 = 0.0;
        for mask in 0u64..(1u64 << m) {
            let mut x = z.center.clone();
            for j in 0..m {
                let s = if mask >> j & 1 == 1 { 1.0 } else { -1.0 };
                x.axpy(s, &z.generators.column(j), 1.0);
            }
            best = best.max(p.of_vector(&x));
        }
        return Ok(best);
    }
    if p == Norm::One && n <= ENUMERATION_LIMIT {
        // ‖x‖₁ = max over sign vectors s of s·x.
        let mut best = f64::NEG_INFINITY;
        for mask in 0u64..(1u64 << n) {
            let s = Vector::from_fn(n, |i, _| if mask >> i & 1 == 1 { 1.0 } else { -1.0 });
            best = best.max(z.support(&s));
        }
        return Ok(best);
    }
    Err(SetError::Unsupported(format!(
        "{p}-norm of a zonotope with {m} generators in dimension {n}"
    )))
}
