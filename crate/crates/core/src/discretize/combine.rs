use std::sync::Arc;

use super::{DiscretizationResult, Metadata, Method};
use crate::sets::ConvexSet;
use crate::{Error, Result};

/// `Ω₀ = ∩ᵢ Ω₀⁽ⁱ⁾` as the support-wise minimum (an outer bound of the
/// intersection, since `ρ(d, ∩Xᵢ) ≤ minᵢ ρ(d, Xᵢ)`).
///
/// All members must share `δ` and dimension. `𝒱` and `Φ` are taken from the
/// first member.
pub fn combine_intersection(results: Vec<DiscretizationResult>) -> Result<DiscretizationResult> {
    if results.len() < 2 {
        return Err(Error::InvalidArgument(
            "intersection needs at least two results".into(),
        ));
    }
    let first = &results[0];
    let n = first.omega0.dim();
    for r in &results[1..] {
        if r.delta != first.delta {
            return Err(Error::InvalidArgument(format!(
                "cannot intersect results for delta {} and {}",
                first.delta, r.delta
            )));
        }
        if r.omega0.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: r.omega0.dim(),
            });
        }
    }
    let methods: Vec<Method> = results.iter().map(|r| r.method.clone()).collect();
    let members: Vec<Arc<ConvexSet>> = results.iter().map(|r| Arc::new(r.omega0.clone())).collect();
    let label = Method::Intersection(methods.clone()).label();
    let omega0 = ConvexSet::oracle(n, label, move |d| {
        members
            .iter()
            .map(|m| m.support_unchecked(d))
            .fold(f64::INFINITY, f64::min)
    });
    let mut it = results.into_iter();
    let head = it.next().expect("checked length");
    let notes = it.map(|r| format!("member {}", r.method.label())).collect();
    Ok(DiscretizationResult {
        omega0,
        v: head.v,
        phi: head.phi,
        delta: head.delta,
        method: Method::Intersection(methods),
        metadata: Metadata {
            input_set: head.metadata.input_set,
            notes,
            ..head.metadata
        },
    })
}
