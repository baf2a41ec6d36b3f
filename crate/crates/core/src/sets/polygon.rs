use std::f64::consts::PI;

use super::{ConvexSet, SetError, SetResult};
use crate::Vector;

/// Outer polygon of a planar set from `k` uniformly spaced support lines
/// starting at angle `0`. Vertices are counterclockwise.
pub fn polygon_outline(x: &ConvexSet, k: usize) -> SetResult<Vec<[f64; 2]>> {
    polygon_outline_with_offset(x, k, 0.0)
}

/// As [`polygon_outline`], with the first direction at angle `offset`.
pub fn polygon_outline_with_offset(
    x: &ConvexSet,
    k: usize,
    offset: f64,
) -> SetResult<Vec<[f64; 2]>> {
    if x.dim() != 2 {
        return Err(SetError::DimensionMismatch {
            expected: 2,
            found: x.dim(),
        });
    }
    if k < 3 {
        return Err(SetError::InvalidArgument(format!(
            "polygon needs at least 3 directions, got {k}"
        )));
    }
    let normals: Vec<[f64; 2]> = (0..k)
        .map(|j| {
            let t = offset + 2.0 * PI * j as f64 / k as f64;
            [t.cos(), t.sin()]
        })
        .collect();
    let rho: Vec<f64> = normals
        .iter()
        .map(|n| x.support_unchecked(&Vector::from_column_slice(n)))
        .collect();

    let mut verts: Vec<[f64; 2]> = Vec::with_capacity(k);
    let scale = rho.iter().fold(1.0f64, |a, r| a.max(r.abs()));
    for j in 0..k {
        let (a, b) = (normals[j], normals[(j + 1) % k]);
        let det = a[0] * b[1] - a[1] * b[0];
        let p = [
            (rho[j] * b[1] - rho[(j + 1) % k] * a[1]) / det,
            (a[0] * rho[(j + 1) % k] - b[0] * rho[j]) / det,
        ];
        let dup = verts
            .last()
            .is_some_and(|q| (q[0] - p[0]).abs().max((q[1] - p[1]).abs()) <= 1e-12 * scale);
        if !dup {
            verts.push(p);
        }
    }
    while verts.len() > 1 {
        let (f, l) = (verts[0], verts[verts.len() - 1]);
        if (f[0] - l[0]).abs().max((f[1] - l[1]).abs()) <= 1e-12 * scale {
            verts.pop();
        } else {
            break;
        }
    }
    Ok(verts)
}

/// Shoelace area of a simple polygon.
pub fn polygon_area(verts: &[[f64; 2]]) -> f64 {
    let n = verts.len();
    (0..n)
        .map(|i| {
            let (p, q) = (verts[i], verts[(i + 1) % n]);
            p[0] * q[1] - q[0] * p[1]
        })
        .sum::<f64>()
        / 2.0
}
