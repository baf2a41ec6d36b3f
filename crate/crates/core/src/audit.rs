//! Empirical enclosure checks by trajectory sampling, and the search for an
//! unreachable point inside the shrunk d/dt set.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::discretize::LinearSystem;
use crate::matfun::{mat_exp, transmission_matrices};
use crate::sets::{
    box_approximation, polygon_outline, random_directions, sample, ConvexSet, Hyperrectangle,
    MEMBERSHIP_TOL,
};
use crate::{Error, Matrix, Result, Vector};

#[derive(Debug, Clone)]
pub struct AuditConfig {
    pub samples: usize,
    pub directions: usize,
    /// Time grid resolution: `t` and input switching times are multiples of `δ/grid`.
    pub grid: usize,
    /// Allowed excess `d·x − ρ(d, Ω₀)`, relative to `max(1, |ρ|)`.
    pub tol: f64,
    pub seed: u64,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig {
            samples: 1000,
            directions: 100,
            grid: 1000,
            tol: MEMBERSHIP_TOL,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Violation {
    pub time: f64,
    pub state: Vector,
    pub direction: Vector,
    /// `d·x − ρ(d, Ω₀)`.
    pub excess: f64,
}

#[derive(Debug, Clone)]
pub struct AuditReport {
    pub samples: usize,
    pub directions: usize,
    pub violations: usize,
    /// Largest excess found.
    pub worst: Option<Violation>,
    /// `max_d (ρ(d, Ω₀) − max_x d·x) / max(1, |ρ(d, Ω₀)|)`.
    pub max_relative_slack: f64,
    /// Same quantity minimized over directions.
    pub min_relative_slack: f64,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Exact sampler of `x(t)` on the grid `t = k h`, `h = δ/grid`.
///
/// `x(kh)` is assembled from the binary expansion of `k`: a block of length
/// `2ʲh` maps `z ↦ e^{A2ʲh} z + Φ₁(2ʲh) u` with one input value per block,
/// so each sample follows a piecewise-constant admissible input.
pub struct TrajectorySampler {
    h: f64,
    grid: usize,
    steps: Vec<Matrix>,
    inputs: Vec<Matrix>,
    homogeneous: bool,
}

impl TrajectorySampler {
    pub fn new(sys: &LinearSystem, delta: f64, grid: usize) -> Result<Self> {
        if grid == 0 {
            return Err(Error::InvalidArgument("time grid needs at least one step".into()));
        }
        let h = delta / grid as f64;
        let levels = usize::BITS as usize - grid.leading_zeros() as usize;
        let homogeneous = sys.is_homogeneous();
        let (mut p, mut q) = if homogeneous {
            (mat_exp(&(sys.a().as_ref() * h))?, Matrix::zeros(0, 0))
        } else {
            let t = transmission_matrices(sys.a(), h)?;
            (t.phi, t.phi1)
        };
        let mut steps = Vec::with_capacity(levels);
        let mut inputs = Vec::with_capacity(levels);
        for _ in 0..levels {
            let next_p = &p * &p;
            let next_q = if homogeneous {
                q.clone()
            } else {
                &q + &p * &q
            };
            steps.push(std::mem::replace(&mut p, next_p));
            inputs.push(std::mem::replace(&mut q, next_q));
        }
        Ok(TrajectorySampler {
            h,
            grid,
            steps,
            inputs,
            homogeneous,
        })
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    /// `x(k h)` from `x0` with block inputs drawn by `next_u`.
    pub fn state_at(&self, x0: &Vector, k: usize, mut next_u: impl FnMut() -> Vector) -> Vector {
        assert!(k <= self.grid, "grid index {k} beyond {}", self.grid);
        let mut z = x0.clone();
        for j in 0..self.steps.len() {
            if k >> j & 1 == 1 {
                z = &self.steps[j] * z;
                if !self.homogeneous {
                    z += &self.inputs[j] * next_u();
                }
            }
        }
        z
    }

    /// Random `(t, x(t))` with `x0 ∈ X₀` and `u ∈ U` sampled by [`sample`].
    pub fn draw<R: Rng + ?Sized>(&self, sys: &LinearSystem, rng: &mut R) -> Result<(f64, Vector)> {
        let x0 = sample(sys.x0(), rng).ok_or_else(|| unsamplable("initial", sys.x0()))?;
        let k = rng.random_range(0..=self.grid);
        let u_set = sys.u().clone();
        let mut failed = false;
        let x = self.state_at(&x0, k, || match sample(&u_set, rng) {
            Some(u) => u,
            None => {
                failed = true;
                Vector::zeros(u_set.dim())
            }
        });
        if failed {
            return Err(unsamplable("input", sys.u()));
        }
        Ok((k as f64 * self.h, x))
    }
}

fn unsamplable(what: &str, x: &ConvexSet) -> Error {
    Error::InvalidArgument(format!("cannot sample the {what} set {}", x.describe()))
}

/// Checks `x(t) ∈ Ω₀` for sampled trajectories at sampled `t ∈ [0, δ]` along
/// random directions.
pub fn audit_enclosure(
    sys: &LinearSystem,
    omega0: &ConvexSet,
    delta: f64,
    cfg: &AuditConfig,
) -> Result<AuditReport> {
    if omega0.dim() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            found: omega0.dim(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let dirs = random_directions(sys.dim(), cfg.directions, &mut rng);
    let rho: Vec<f64> = dirs.iter().map(|d| omega0.support(d)).collect::<Result<_, _>>()?;
    let sampler = TrajectorySampler::new(sys, delta, cfg.grid)?;
    let mut best = vec![f64::NEG_INFINITY; dirs.len()];
    let mut violations = 0;
    let mut worst: Option<Violation> = None;
    for _ in 0..cfg.samples {
        let (t, x) = sampler.draw(sys, &mut rng)?;
        let mut hit = false;
        for (i, d) in dirs.iter().enumerate() {
            let v = d.dot(&x);
            best[i] = best[i].max(v);
            let excess = v - rho[i];
            if excess > cfg.tol * rho[i].abs().max(1.0) {
                hit = true;
                if worst.as_ref().is_none_or(|w| excess > w.excess) {
                    worst = Some(Violation {
                        time: t,
                        state: x.clone(),
                        direction: d.clone(),
                        excess,
                    });
                }
            }
        }
        violations += hit as usize;
    }
    let slack: Vec<f64> = rho
        .iter()
        .zip(&best)
        .filter(|(_, b)| b.is_finite())
        .map(|(r, b)| (r - b) / r.abs().max(1.0))
        .collect();
    Ok(AuditReport {
        samples: cfg.samples,
        directions: dirs.len(),
        violations,
        worst,
        max_relative_slack: slack.iter().copied().fold(f64::NAN, f64::max),
        min_relative_slack: slack.iter().copied().fold(f64::NAN, f64::min),
    })
}

/// A point of the candidate set with no backward trajectory into `X₀`.
#[derive(Debug, Clone)]
pub struct UnreachableWitness {
    pub point: Vector,
    /// `min_{t on the grid} dist∞(e^{−At} p, X₀)`.
    pub margin: f64,
    /// Time attaining the minimum.
    pub closest_time: f64,
}

/// `min_t dist∞(e^{−At}p, X₀)` over `time_points` uniform times in `[0, δ]`.
pub fn backward_distance(
    sys: &LinearSystem,
    x0: &Hyperrectangle,
    p: &Vector,
    delta: f64,
    time_points: usize,
) -> Result<(f64, f64)> {
    if time_points < 2 {
        return Err(Error::InvalidArgument("need at least two time points".into()));
    }
    let h = delta / (time_points - 1) as f64;
    let back = mat_exp(&(sys.a().as_ref() * -h))?;
    let mut y = p.clone();
    let mut best = (f64::INFINITY, 0.0);
    for k in 0..time_points {
        if k > 0 {
            y = &back * y;
        }
        let d = (0..y.len())
            .map(|i| ((y[i] - x0.center[i]).abs() - x0.radius[i]).max(0.0))
            .fold(0.0, f64::max);
        if d < best.0 {
            best = (d, k as f64 * h);
        }
    }
    Ok(best)
}

/// Searches the 2-D set `candidate` for a point `p` that no homogeneous
/// trajectory from the box `X₀` reaches within `[0, δ]`. Candidates are the
/// vertices of the outer polygon from `directions` support lines and points
/// on the segments between them; each must satisfy every support constraint.
pub fn find_unreachable_point(
    sys: &LinearSystem,
    candidate: &ConvexSet,
    delta: f64,
    directions: usize,
    time_points: usize,
) -> Result<Option<UnreachableWitness>> {
    if sys.dim() != 2 || candidate.dim() != 2 {
        return Err(Error::InvalidArgument("unreachable-point search is planar".into()));
    }
    if !sys.is_homogeneous() {
        return Err(Error::Inapplicable {
            method: "unreachable-point search".into(),
            reason: "backward flow is only exact for homogeneous systems".into(),
        });
    }
    let x0 = match sys.x0().as_ref() {
        ConvexSet::Hyperrectangle(b) => b.clone(),
        ConvexSet::Ball(b) if b.norm == crate::sets::Norm::Inf => box_approximation(sys.x0()),
        other => {
            return Err(Error::InvalidArgument(format!(
                "initial set must be a box, got {}",
                other.describe()
            )))
        }
    };
    let verts = polygon_outline(candidate, directions)?;
    let normals: Vec<Vector> = (0..directions)
        .map(|j| {
            let t = 2.0 * std::f64::consts::PI * j as f64 / directions as f64;
            Vector::from_column_slice(&[t.cos(), t.sin()])
        })
        .collect();
    let rho: Vec<f64> = normals.iter().map(|d| candidate.support(d)).collect::<Result<_, _>>()?;
    let inside = |p: &Vector| {
        normals
            .iter()
            .zip(&rho)
            .all(|(d, r)| d.dot(p) <= r + MEMBERSHIP_TOL * r.abs().max(1.0))
    };

    let mut best: Option<UnreachableWitness> = None;
    let m = verts.len();
    for j in 0..m {
        let a = Vector::from_column_slice(&verts[j]);
        let b = Vector::from_column_slice(&verts[(j + 1) % m]);
        for s in [0.0, 0.25, 0.5, 0.75] {
            let p = &a * (1.0 - s) + &b * s;
            if !inside(&p) {
                continue;
            }
            let (margin, t) = backward_distance(sys, &x0, &p, delta, time_points)?;
            if margin > 0.0 && best.as_ref().is_none_or(|w| margin > w.margin) {
                best = Some(UnreachableWitness {
                    point: p,
                    margin,
                    closest_time: t,
                });
            }
        }
    }
    Ok(best)
}

/// Oscillator with the large box `X₀ = [−1, 1] × [−0.05, 0.05]` and
/// `δ = 0.05`, where the shrunk d/dt set visibly leaves the reachable states.
pub fn underapprox_counterexample() -> Result<(LinearSystem, f64)> {
    let a = Matrix::from_row_slice(2, 2, &[0.0, 1.0, -4.0 * std::f64::consts::PI, 0.0]);
    let x0 = ConvexSet::hyperrectangle(Vector::zeros(2), Vector::from_column_slice(&[1.0, 0.05]))?;
    Ok((LinearSystem::homogeneous(a, x0)?, 0.05))
}
