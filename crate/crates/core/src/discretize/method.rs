use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::matfun::{KrylovConfig, Norm};
use crate::sets::ConvexSet;
use crate::{Error, Matrix};

/// Default truncation order of the correction hull.
pub const DEFAULT_ORDER: usize = 4;

/// Discretization method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Method {
    /// `CH(X₀, ΦX₀) ⊕ B_ε` with the d/dt curvature correction.
    DdtFirstOrder,
    /// Zonotope cover of `CH(X₀, ΦX₀)` bloated by an ∞-ball.
    ZonotopeFirstOrder,
    /// Taylor correction hull of order `p`.
    CorrectionHull { order: usize },
    /// `CH(X₀, ΦX₀ ⊕ δU ⊕ B_ε)`.
    FirstOrder,
    /// Exact hull over the interpolation parameter `λ`.
    ForwardBackward,
    ForwardOnly,
    BackwardOnly,
    /// Support-wise minimum of several methods.
    Intersection(Vec<Method>),
}

impl Method {
    /// Column label used in sweep output.
    pub fn label(&self) -> String {
        match self {
            Method::DdtFirstOrder => "d-dt".into(),
            Method::ZonotopeFirstOrder => "Zonotope".into(),
            Method::CorrectionHull { .. } => "Correction-hull".into(),
            Method::FirstOrder => "First-order".into(),
            Method::ForwardBackward => "Forward-backward".into(),
            Method::ForwardOnly => "Forward".into(),
            Method::BackwardOnly => "Backward".into(),
            Method::Intersection(ms) => ms
                .iter()
                .map(Method::label)
                .collect::<Vec<_>>()
                .join("∩"),
        }
    }

    /// Short command-line name, the inverse of [`FromStr`].
    pub fn short_name(&self) -> String {
        match self {
            Method::DdtFirstOrder => "ddt".into(),
            Method::ZonotopeFirstOrder => "zonotope".into(),
            Method::CorrectionHull { order } if *order == DEFAULT_ORDER => {
                "correction-hull".into()
            }
            Method::CorrectionHull { order } => format!("correction-hull:{order}"),
            Method::FirstOrder => "first-order".into(),
            Method::ForwardBackward => "forward-backward".into(),
            Method::ForwardOnly => "forward".into(),
            Method::BackwardOnly => "backward".into(),
            Method::Intersection(ms) => ms
                .iter()
                .map(Method::short_name)
                .collect::<Vec<_>>()
                .join("+"),
        }
    }

    /// The six base methods in presentation order.
    pub fn all() -> Vec<Method> {
        vec![
            Method::DdtFirstOrder,
            Method::ZonotopeFirstOrder,
            Method::CorrectionHull {
                order: DEFAULT_ORDER,
            },
            Method::FirstOrder,
            Method::ForwardBackward,
            Method::ForwardOnly,
        ]
    }

    pub fn validate(&self) -> Result<(), Error> {
        match self {
            Method::CorrectionHull { order: 0 } => Err(Error::InvalidArgument(
                "correction hull needs truncation order p >= 1".into(),
            )),
            Method::Intersection(ms) if ms.len() < 2 => Err(Error::InvalidArgument(
                "intersection needs at least two methods".into(),
            )),
            Method::Intersection(ms) => ms.iter().try_for_each(Method::validate),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for Method {
    type Err = String;

    /// Accepts the short names (`ddt`, `zonotope`, `correction-hull[:p]`,
    /// `first-order`, `forward-backward`, `forward`, `backward`) and
    /// `a+b[+…]` for intersections.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.contains('+') {
            let ms = s
                .split('+')
                .map(str::parse)
                .collect::<Result<Vec<Method>, _>>()?;
            return Ok(Method::Intersection(ms));
        }
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let m = match name.trim().to_ascii_lowercase().as_str() {
            "ddt" | "d-dt" | "d/dt" => Method::DdtFirstOrder,
            "zonotope" => Method::ZonotopeFirstOrder,
            "correction-hull" | "correction_hull" | "ch" => {
                let order = match arg {
                    Some(a) => a
                        .parse()
                        .map_err(|_| format!("invalid correction-hull order {a:?}"))?,
                    None => DEFAULT_ORDER,
                };
                return Ok(Method::CorrectionHull { order });
            }
            "first-order" | "first_order" => Method::FirstOrder,
            "forward-backward" | "forward_backward" | "fwbw" => Method::ForwardBackward,
            "forward" | "forward-only" => Method::ForwardOnly,
            "backward" | "backward-only" => Method::BackwardOnly,
            other => return Err(format!("unknown method {other:?}")),
        };
        if arg.is_some() {
            return Err(format!("method {name:?} takes no parameter"));
        }
        Ok(m)
    }
}

/// Knobs shared by all methods.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct DiscretizeOptions {
    /// Norm for `‖A‖`, `‖X₀‖`, `‖U‖` and the bloating ball where a method
    /// leaves it open. The zonotope and correction-hull methods always use ∞.
    pub norm: Norm,
    /// Evaluate the forward-only method through Krylov actions instead of
    /// dense `e^{Aδ}` and `Φ₂`.
    pub krylov: Option<KrylovConfig>,
}

/// Method-specific numbers reported next to `Ω₀`.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct Metadata {
    pub norm: Norm,
    /// Bloating radius where the method has one.
    pub epsilon: Option<f64>,
    /// Remainder convergence ratio of the correction hull.
    pub alpha: Option<f64>,
    /// Truncation order of the correction hull.
    pub order: Option<usize>,
    /// True when a negative d/dt radius was raised to zero.
    pub epsilon_clamped: bool,
    /// True when the system was homogenized internally.
    pub homogenized: bool,
    /// `(γ, k)` of a shrunk time step.
    pub shrink: Option<(f64, usize)>,
    pub krylov: Option<KrylovConfig>,
    /// How `𝒱` was built.
    pub input_set: String,
    pub notes: Vec<String>,
}

/// `Ω₀ ⊇ ℛ_{[0,δ]}` together with the one-step data of the discrete system.
#[derive(Debug, Clone)]
pub struct DiscretizationResult {
    pub omega0: ConvexSet,
    /// Discretized input set.
    pub v: ConvexSet,
    /// `e^{Aδ}`; `None` when the method never formed it (Krylov evaluation).
    pub phi: Option<Matrix>,
    pub delta: f64,
    pub method: Method,
    pub metadata: Metadata,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        let mut all = Method::all();
        all.push(Method::BackwardOnly);
        all.push(Method::CorrectionHull { order: 7 });
        all.push(Method::Intersection(vec![
            Method::ForwardOnly,
            Method::BackwardOnly,
        ]));
        for m in all {
            assert_eq!(m.short_name().parse::<Method>().unwrap(), m);
        }
        assert!("nope".parse::<Method>().is_err());
        assert!("forward:3".parse::<Method>().is_err());
    }

    #[test]
    fn labels() {
        let labels: Vec<_> = Method::all().iter().map(Method::label).collect();
        assert_eq!(
            labels,
            [
                "d-dt",
                "Zonotope",
                "Correction-hull",
                "First-order",
                "Forward-backward",
                "Forward"
            ]
        );
    }

    #[test]
    fn validation() {
        assert!(Method::CorrectionHull { order: 0 }.validate().is_err());
        assert!(Method::Intersection(vec![Method::ForwardOnly]).validate().is_err());
        assert!(Method::ForwardOnly.validate().is_ok());
    }
}
