use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{check_dim, ConvexSet, SetResult};
use crate::matfun::Norm;
use crate::Vector;

/// Absolute slack used when certifying `x ∉ X` from a support value.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// First direction `d` with `d·x > ρ(d, X) + 1e-9`, certifying `x ∉ X`.
pub fn violates_membership(
    x: &Vector,
    set: &ConvexSet,
    dirs: &[Vector],
) -> SetResult<Option<Vector>> {
    violates_membership_tol(x, set, dirs, MEMBERSHIP_TOL)
}

pub fn violates_membership_tol(
    x: &Vector,
    set: &ConvexSet,
    dirs: &[Vector],
    tol: f64,
) -> SetResult<Option<Vector>> {
    check_dim(set.dim(), x.len())?;
    for d in dirs {
        if d.dot(x) > set.support(d)? + tol {
            return Ok(Some(d.clone()));
        }
    }
    Ok(None)
}

/// `count` directions drawn uniformly from the unit sphere in ℝⁿ.
pub fn random_directions<R: Rng + ?Sized>(n: usize, count: usize, rng: &mut R) -> Vec<Vector> {
    (0..count)
        .map(|_| loop {
            let d = Vector::from_fn(n, |_, _| StandardNormal.sample(rng));
            let norm = d.norm();
            if norm > 1e-12 {
                break d / norm;
            }
        })
        .collect()
}

/// Random member of `X`, biased towards the boundary and vertices so that
/// sampled maxima approach support values. `None` for oracle sets.
pub fn sample<R: Rng + ?Sized>(x: &ConvexSet, rng: &mut R) -> Option<Vector> {
    match x {
        ConvexSet::Singleton(p) => Some(p.clone()),
        ConvexSet::Hyperrectangle(h) => Some(&h.center + cube_point(h.dim(), rng).component_mul(&h.radius)),
        ConvexSet::Ball(b) => {
            let n = b.dim();
            let u = match b.norm {
                Norm::Inf => cube_point(n, rng),
                Norm::Two => {
                    let g = random_directions(n, 1, rng).pop().unwrap();
                    g * radial(n, rng)
                }
                Norm::One => {
                    if rng.random_bool(0.5) {
                        let mut e = Vector::zeros(n);
                        e[rng.random_range(0..n)] = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                        e
                    } else {
                        let w = Vector::from_fn(n, |_, _| {
                            let s = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                            s * -rng.random::<f64>().max(f64::MIN_POSITIVE).ln()
                        });
                        let l1 = w.abs().sum();
                        w / l1 * radial(n, rng)
                    }
                }
            };
            Some(&b.center + u * b.radius)
        }
        ConvexSet::Zonotope(z) => {
            let xi = cube_point(z.order(), rng);
            Some(&z.center + &z.generators * xi)
        }
        ConvexSet::Sum(a, b) => Some(sample(a, rng)? + sample(b, rng)?),
        ConvexSet::Map(m, y) => Some(m.as_ref() * sample(y, rng)?),
        ConvexSet::Hull(a, b) => {
            let lambda = match rng.random_range(0..4) {
                0 => 0.0,
                1 => 1.0,
                _ => rng.random::<f64>(),
            };
            let (p, q) = (sample(a, rng)?, sample(b, rng)?);
            Some(p * lambda + q * (1.0 - lambda))
        }
        ConvexSet::Scale(c, y) => Some(sample(y, rng)? * *c),
        ConvexSet::Oracle(_) => None,
    }
}

/// Point of `[−1, 1]^m`; each coordinate is a vertex value with probability 3/4.
fn cube_point<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vector {
    Vector::from_fn(m, |_, _| {
        if rng.random_bool(0.75) {
            if rng.random_bool(0.5) {
                1.0
            } else {
                -1.0
            }
        } else {
            rng.random_range(-1.0..=1.0)
        }
    })
}

/// Radial coordinate for a ball in ℝⁿ: on the sphere half the time, else uniform in volume.
fn radial<R: Rng + ?Sized>(n: usize, rng: &mut R) -> f64 {
    if rng.random_bool(0.5) {
        1.0
    } else {
        rng.random::<f64>().powf(1.0 / n as f64)
    }
}
