//! Conservative time discretization for linear time-invariant systems.
//!
//! Given `x'(t) = A x(t) + u(t)` with `x(0) ∈ X0` and `u(t) ∈ U`, every method
//! in [`discretize`] returns a convex set `Ω0` enclosing all states reachable
//! on `[0, δ]`. Sets are handled through support functions: concrete leaves
//! (boxes, balls, zonotopes, points) compose lazily under Minkowski sum,
//! linear maps, convex hull and scaling, see [`sets`].
//!
//! Module map:
//!
//! - [`matfun`]: matrix exponential, `Φ₂`, Taylor remainder interval
//!   matrices, Krylov actions, sparse storage.
//! - [`sets`]: convex set algebra and support functions.
//! - [`discretize`]: the discretization methods and their combinator.
//! - [`transform`]: homogenization, projection, propagation, time-step
//!   shrinking.
//! - [`models`]: benchmark systems and file loading.
//! - [`audit`]: trajectory sampling used to check enclosures empirically.

pub mod audit;
pub mod discretize;
pub mod matfun;
pub mod models;
pub mod sets;
pub mod transform;

mod error;

pub use error::{Error, Result};

/// Dense real matrix used throughout the crate.
pub type Matrix = nalgebra::DMatrix<f64>;
/// Dense real vector used throughout the crate.
pub type Vector = nalgebra::DVector<f64>;
