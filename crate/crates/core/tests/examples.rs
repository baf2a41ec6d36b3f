//! Worked examples with closed-form or independently computed answers.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lti_reach::audit::{audit_enclosure, AuditConfig};
use lti_reach::discretize::{
    backward_only, combine_intersection, correction_hull, ddt_epsilon, ddt_first_order,
    ddt_shrink_underapprox, discretize, first_order, forward_backward, forward_only,
    input_set_v, transition, zonotope_first_order, DiscretizeOptions, LinearSystem, Method,
    DEFAULT_ORDER,
};
use lti_reach::matfun::{
    self, correction_matrices, exp_remainder, krylov_expv, krylov_phi2v, mat_exp, phi2,
    transmission_matrices, IntervalMatrix, KrylovConfig, Norm,
};
use lti_reach::models::{heat3d, oscillator};
use lti_reach::sets::{
    box_approximation, interval_map, polygon_area, polygon_outline, polygon_outline_with_offset,
    random_directions, sample, scaled_box_intersection, set_norm, symmetric_interval_hull,
    violates_membership, zonotope_hull, ConvexSet, Hyperrectangle, Zonotope,
};
use lti_reach::transform::{homogenize, project_out_aux, propagate, shrink_time_step};
use lti_reach::{Matrix, Vector};

fn v(x: &[f64]) -> Vector {
    Vector::from_column_slice(x)
}

fn m2(x: [f64; 4]) -> Matrix {
    Matrix::from_row_slice(2, 2, &x)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn osc_a() -> Matrix {
    m2([0.0, 1.0, -4.0 * PI, 0.0])
}

fn x0_osc() -> ConvexSet {
    ConvexSet::ball(Norm::Inf, v(&[0.0, 10.0]), 0.1).unwrap()
}

fn same_support(x: &ConvexSet, y: &ConvexSet, tol: f64) {
    for d in random_directions(x.dim(), 50, &mut rng(77)) {
        let (a, b) = (x.support(&d).unwrap(), y.support(&d).unwrap());
        assert!((a - b).abs() <= tol * a.abs().max(1.0), "{a} vs {b} in {d:?}");
    }
}

fn random_matrix(n: usize, seed: u64) -> Matrix {
    use rand::Rng;
    let mut r = rng(seed);
    Matrix::from_fn(n, n, |_, _| r.random_range(-1.0..1.0))
}

// ---- matrix functions ----

#[test]
fn exp_of_zero_and_diagonal() {
    assert_eq!(mat_exp(&Matrix::zeros(3, 3)).unwrap(), Matrix::identity(3, 3));
    let e = mat_exp(&Matrix::from_diagonal(&v(&[0.3, -2.0]))).unwrap();
    assert!((e[(0, 0)] - 0.3f64.exp()).abs() < 1e-15);
    assert!((e[(1, 1)] - (-2.0f64).exp()).abs() < 1e-15);
    assert_eq!(e[(0, 1)], 0.0);
}

#[test]
fn exp_of_oscillator_is_rotation() {
    let d = 0.01;
    let w = (4.0 * PI).sqrt();
    let (s, c) = (w * d).sin_cos();
    let want = m2([c, s / w, -w * s, c]);
    let got = mat_exp(&(osc_a() * d)).unwrap();
    assert!((got - want).amax() < 1e-15);
}

#[test]
fn phi2_zero_and_inverse_formula() {
    let d = 0.01;
    let p = phi2(&Matrix::zeros(3, 3), d).unwrap();
    assert!((p - Matrix::identity(3, 3) * (d * d / 2.0)).amax() < 1e-20);

    let a = osc_a();
    let inv = a.clone().try_inverse().unwrap();
    let phi = mat_exp(&(&a * d)).unwrap();
    let want = &inv * &inv * (phi - Matrix::identity(2, 2) - &a * d);
    let got = phi2(&a, d).unwrap();
    assert!((&got - &want).amax() <= 1e-10 * want.amax(), "{got} vs {want}");
}

#[test]
fn phi2_of_abs_is_nonnegative() {
    for seed in 0..5 {
        let a = matfun::abs(&random_matrix(6, seed));
        let p = phi2(&a, 0.7).unwrap();
        assert!(p.iter().all(|&x| x >= 0.0));
    }
}

#[test]
fn krylov_trivial_cases() {
    let zero = lti_reach::matfun::SparseMatrix::from_dense(&Matrix::zeros(4, 4));
    let cfg = KrylovConfig::new(3, 0.0);
    let x = v(&[1.0, -2.0, 3.0, 0.5]);
    let e = krylov_expv(&zero, &x, 0.1, &cfg).unwrap();
    assert!((e - &x).amax() < 1e-15);
    let p = krylov_phi2v(&zero, &x.abs(), 0.1, &cfg).unwrap();
    assert!((p - x.abs() * 0.005).amax() < 1e-15);
    let r0 = krylov_phi2v(&zero, &Vector::zeros(4), 0.1, &cfg).unwrap();
    assert_eq!(r0.amax(), 0.0);
}

#[test]
fn krylov_matches_dense_on_heat3d() {
    let sys = heat3d(5).unwrap();
    let a = sys.a_sparse();
    let cfg = KrylovConfig::new(30, 0.0);
    let mut r = rng(5);
    let x = Vector::from_fn(125, |_, _| rand::Rng::random_range(&mut r, -1.0..1.0));
    let want = mat_exp(sys.a()).unwrap() * &x;
    let got = krylov_expv(a.as_ref(), &x, 1.0, &cfg).unwrap();
    assert!((&got - &want).amax() <= 1e-8 * want.amax());
    let scaled = krylov_expv(a.as_ref(), &(&x * 3.0), 1.0, &cfg).unwrap();
    assert!((scaled - &got * 3.0).amax() <= 1e-12 * got.amax());

    let abs_a = a.abs();
    let ones = Vector::from_element(125, 1.0);
    let want = phi2(&abs_a.to_dense(), 0.01).unwrap() * &ones;
    let got = krylov_phi2v(&abs_a, &ones, 0.01, &cfg).unwrap();
    assert!((&got - &want).amax() <= 1e-8 * want.amax());
}

#[test]
fn remainder_examples() {
    let r = exp_remainder(&Matrix::zeros(2, 2), 0.1, 4).unwrap();
    assert_eq!(r.epsilon, 0.0);
    assert_eq!(r.e.rad().amax(), 0.0);

    let r = exp_remainder(&osc_a(), 0.01, 4).unwrap();
    let x = 4.0 * PI * 0.01;
    let want = x.powi(5) / 120.0 / (1.0 - x / 6.0);
    assert!((r.epsilon - want).abs() <= 1e-15 * want);
    // The closed form bounds the actual series tail.
    let mut tail = 0.0;
    let mut term = x.powi(5) / 120.0;
    for i in 5..40 {
        tail += term;
        term *= x / (i + 1) as f64;
    }
    assert!(tail <= r.epsilon && r.epsilon <= tail * 1.01);

    let err = exp_remainder(&m2([6.0, 0.0, 0.0, 0.0]), 1.0, 4).unwrap_err();
    assert!(err.to_string().contains("alpha"));
}

#[test]
fn correction_matrices_examples() {
    let d = 0.05;
    let c = correction_matrices(&Matrix::zeros(2, 2), d, 4).unwrap();
    assert!(c.f.lo().amax() == 0.0 && c.f.hi().amax() == 0.0);
    let want_g = Matrix::identity(2, 2) * d;
    assert!((c.g.mid() - want_g).amax() < 1e-18);

    let a = osc_a();
    let c2 = correction_matrices(&a, d, 2).unwrap();
    let a2 = &a * &a / 2.0;
    let want = c2
        .remainder
        .e
        .add(&IntervalMatrix::scalar_times(-d * d / 4.0, 0.0, &a2))
        .unwrap();
    assert!((c2.f.lo() - want.lo()).amax() < 1e-15);
    assert!((c2.f.hi() - want.hi()).amax() < 1e-15);
}

// ---- sets ----

#[test]
fn ball_support_and_norms() {
    let b = x0_osc();
    assert!((b.support(&v(&[1.0, 1.0])).unwrap() - 10.2).abs() < 1e-12);
    assert!((set_norm(&b, Norm::Inf).unwrap() - 10.1).abs() < 1e-12);
    let z = ConvexSet::zonotope(Vector::zeros(2), Matrix::from_column_slice(2, 1, &[0.5, -3.0])).unwrap();
    assert!((set_norm(&z, Norm::Inf).unwrap() - 3.0).abs() < 1e-12);
}

#[test]
fn symmetric_hull_examples() {
    let h = symmetric_interval_hull(&x0_osc());
    assert_eq!(h.center, Vector::zeros(2));
    assert!((h.radius - v(&[0.1, 10.1])).amax() < 1e-12);

    let a = osc_a();
    let a2 = &a * &a;
    let (c, r) = (v(&[1.0, -2.0]), v(&[0.3, 0.4]));
    let bx = ConvexSet::hyperrectangle(c.clone(), r.clone()).unwrap();
    let got = symmetric_interval_hull(&ConvexSet::map(a2.clone(), bx).unwrap());
    let want = (&a2 * &c).abs() + matfun::abs(&a2) * &r;
    assert!((got.radius - want).amax() < 1e-12);

    assert_eq!(symmetric_interval_hull(&ConvexSet::origin(3)).radius.amax(), 0.0);
}

#[test]
fn box_approximation_examples() {
    let h = ConvexSet::hyperrectangle(v(&[1.0, 2.0]), v(&[0.5, 0.25])).unwrap();
    let b = box_approximation(&h);
    assert!((b.center - v(&[1.0, 2.0])).amax() < 1e-12);
    assert!((b.radius - v(&[0.5, 0.25])).amax() < 1e-12);

    let x = ConvexSet::zonotope(v(&[0.0, 1.0]), m2([1.0, 0.5, -0.5, 1.0])).unwrap();
    let y = x0_osc();
    let hull = ConvexSet::hull(x.clone(), y.clone()).unwrap();
    let bh: ConvexSet = box_approximation(&hull).into();
    for i in 0..2 {
        for s in [1.0, -1.0] {
            let mut e = Vector::zeros(2);
            e[i] = s;
            let outer = bh.support(&e).unwrap();
            assert!(outer >= x.support(&e).unwrap() && outer >= y.support(&e).unwrap());
        }
    }
}

#[test]
fn zonotope_hull_examples() {
    let x0 = Zonotope::new(v(&[1.0, 0.0]), m2([0.2, 0.0, 0.1, 0.3])).unwrap();
    let same = zonotope_hull(&x0, &Matrix::identity(2, 2)).unwrap();
    same_support(&same.into(), &x0.clone().into(), 1e-12);

    let phi = mat_exp(&(osc_a() * 0.3)).unwrap();
    let z: ConvexSet = zonotope_hull(&x0, &phi).unwrap().into();
    let x: ConvexSet = x0.clone().into();
    let px = ConvexSet::map(phi.clone(), x.clone()).unwrap();
    for d in random_directions(2, 100, &mut rng(1)) {
        let lo = x.support(&d).unwrap().max(px.support(&d).unwrap());
        assert!(z.support(&d).unwrap() >= lo - 1e-12);
    }

    let c = v(&[1.0, 2.0]);
    let seg: ConvexSet = zonotope_hull(&Zonotope::point(c.clone()), &phi).unwrap().into();
    let pc = &phi * &c;
    for d in random_directions(2, 50, &mut rng(2)) {
        let want = d.dot(&c).max(d.dot(&pc));
        assert!((seg.support(&d).unwrap() - want).abs() < 1e-12);
    }
}

#[test]
fn interval_map_examples() {
    let z = Zonotope::new(v(&[1.0, -1.0]), m2([0.5, 0.1, 0.0, 0.2])).unwrap();
    let m = m2([1.0, 2.0, -0.5, 0.3]);
    let exact = interval_map(&IntervalMatrix::point(m.clone()), &z).unwrap();
    same_support(&exact.into(), &z.linear_map(&m).unwrap().into(), 1e-12);

    let zero = Zonotope::point(Vector::zeros(2));
    let r = interval_map(&IntervalMatrix::symmetric(2, 2, 0.1), &zero).unwrap();
    assert_eq!(r.abs_generator_sum().amax(), 0.0);
    assert_eq!(r.center.amax(), 0.0);

    use rand::Rng;
    let mut g = rng(3);
    let mid = Matrix::from_fn(2, 2, |_, _| g.random_range(-1.0..1.0));
    let rad = Matrix::from_fn(2, 2, |_, _| g.random_range(0.0..0.3));
    let im = IntervalMatrix::new(&mid - &rad, &mid + &rad).unwrap();
    let out: ConvexSet = interval_map(&im, &z).unwrap().into();
    let zc: ConvexSet = z.into();
    let dirs = random_directions(2, 100, &mut g);
    for _ in 0..1000 {
        let mm = Matrix::from_fn(2, 2, |i, j| mid[(i, j)] + rad[(i, j)] * g.random_range(-1.0..=1.0));
        let x = sample(&zc, &mut g).unwrap();
        assert!(violates_membership(&(mm * x), &out, &dirs).unwrap().is_none());
    }
}

#[test]
fn scaled_box_intersection_examples() {
    let ones = Vector::from_element(3, 1.0);
    assert_eq!(scaled_box_intersection(&ones, &ones, 0.0).unwrap().radius.amax(), 0.0);
    assert_eq!(scaled_box_intersection(&ones, &ones, 1.0).unwrap().radius.amax(), 0.0);
    let r = scaled_box_intersection(&ones, &ones, 0.3).unwrap().radius;
    assert!((r - &ones * 0.3).amax() < 1e-15);
}

#[test]
fn polygon_examples() {
    let unit = ConvexSet::ball(Norm::Inf, Vector::zeros(2), 1.0).unwrap();
    let sq = polygon_outline_with_offset(&unit, 4, PI / 4.0).unwrap();
    assert_eq!(sq.len(), 4);
    for w in 0..4 {
        let (p, q) = (sq[w], sq[(w + 1) % 4]);
        let side = ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt();
        assert!((side - 2.0 * 2f64.sqrt()).abs() < 1e-12, "{side}");
    }

    let disc = ConvexSet::ball(Norm::Two, Vector::zeros(2), 1.0).unwrap();
    let mut prev = f64::INFINITY;
    for k in [4, 8, 16, 32, 64, 128] {
        let area = polygon_area(&polygon_outline(&disc, k).unwrap());
        assert!(area < prev && area > PI);
        prev = area;
    }
    assert!(prev - PI < 2e-3);

    let bx = ConvexSet::hyperrectangle(v(&[1.0, 2.0]), v(&[0.5, 0.25])).unwrap();
    let verts = polygon_outline(&bx, 8).unwrap();
    for corner in [[1.5, 2.25], [0.5, 2.25], [0.5, 1.75], [1.5, 1.75]] {
        assert!(verts
            .iter()
            .any(|p| (p[0] - corner[0]).abs() < 1e-12 && (p[1] - corner[1]).abs() < 1e-12));
    }
}

#[test]
fn membership_examples() {
    let bx = ConvexSet::hyperrectangle(v(&[1.0, 2.0]), v(&[0.5, 0.25])).unwrap();
    let dirs = random_directions(2, 20, &mut rng(4));
    assert!(violates_membership(&v(&[1.0, 2.0]), &bx, &dirs).unwrap().is_none());
    let e1 = vec![v(&[0.0, 1.0]), v(&[1.0, 0.0])];
    assert_eq!(violates_membership(&v(&[1.6, 2.0]), &bx, &e1).unwrap(), Some(v(&[1.0, 0.0])));
}

#[test]
fn map_support_identity() {
    let x = ConvexSet::zonotope(v(&[0.3, -1.0, 2.0]), random_matrix(3, 9)).unwrap();
    let phi = random_matrix(3, 10);
    let mx = ConvexSet::map(phi.clone(), x.clone()).unwrap();
    for d in random_directions(3, 50, &mut rng(6)) {
        let want = x.support(&(phi.transpose() * &d)).unwrap();
        assert!((mx.support(&d).unwrap() - want).abs() < 1e-12);
    }
}

// ---- discretization ----

fn homog_osc() -> LinearSystem {
    oscillator(0.0, 0.0).unwrap()
}

fn osc_with_box_input() -> LinearSystem {
    LinearSystem::new(
        osc_a(),
        x0_osc(),
        ConvexSet::hyperrectangle(Vector::zeros(2), v(&[0.0, 1.0])).unwrap(),
    )
    .unwrap()
}

fn zero_dynamics(u: ConvexSet) -> LinearSystem {
    let x0 = ConvexSet::hyperrectangle(v(&[1.0, -1.0]), v(&[0.2, 0.1])).unwrap();
    LinearSystem::new(Matrix::zeros(2, 2), x0, u).unwrap()
}

#[test]
fn ddt_epsilon_value_and_limit() {
    let sys = homog_osc();
    let (eps, clamped) = ddt_epsilon(&sys, 0.01, Norm::Inf).unwrap();
    let x = 4.0 * PI * 0.01;
    let want = (x.exp() - 1.0 - x) * 10.1 - 0.375 * x * x * 10.1;
    assert!((eps - want).abs() <= 1e-12 * want, "{eps} vs {want}");
    // The rounded reference 0.0233632 is about 2e-5 below the formula value.
    assert!((eps - 0.0233632).abs() < 5e-5, "{eps}");
    assert!(!clamped);

    let d = v(&[1.0, 1.0]);
    let r = ddt_first_order(&sys, 1e-9, &DiscretizeOptions::default()).unwrap();
    assert!((r.omega0.support(&d).unwrap() - 10.2).abs() < 1e-7);
}

#[test]
fn zonotope_method_examples() {
    let opts = DiscretizeOptions::default();
    let sys = homog_osc();
    let z = zonotope_first_order(&sys, 0.01).unwrap();
    let ddt = ddt_first_order(&sys, 0.01, &opts).unwrap();
    let dirs = random_directions(2, 100, &mut rng(8));
    let mut g = rng(9);
    for _ in 0..1000 {
        let p = sample(&ddt.omega0, &mut g).unwrap();
        assert!(violates_membership(&p, &z.omega0, &dirs).unwrap().is_none());
    }

    let still = zero_dynamics(ConvexSet::origin(2));
    let r = zonotope_first_order(&still, 0.5).unwrap();
    same_support(&r.omega0, still.x0(), 1e-12);

    let het = osc_with_box_input();
    let d = v(&[1.0, 1.0]);
    let zr = zonotope_first_order(&het, 0.01).unwrap().omega0.support(&d).unwrap();
    let fr = forward_only(&het, 0.01, &opts).unwrap().omega0.support(&d).unwrap();
    assert!(zr >= fr, "{zr} < {fr}");
}

#[test]
fn correction_hull_examples() {
    assert_eq!(DEFAULT_ORDER, 4);
    let still = zero_dynamics(ConvexSet::origin(2));
    let r = correction_hull(&still, 0.5, 4).unwrap();
    same_support(&r.omega0, still.x0(), 1e-12);

    let sys = homog_osc();
    let r = correction_hull(&sys, 0.01, 4).unwrap();
    let rep = audit_enclosure(&sys, &r.omega0, 0.01, &AuditConfig::default()).unwrap();
    assert!(rep.passed(), "{rep:?}");
}

#[test]
fn first_order_examples() {
    let opts = DiscretizeOptions::default();
    let sys = homog_osc();
    let fo = first_order(&sys, 0.01, &opts).unwrap();
    let ddt = ddt_first_order(&sys, 0.01, &opts).unwrap();
    assert!(fo.metadata.epsilon.unwrap() > ddt.metadata.epsilon.unwrap());
    // Only the moved copy is bloated here, so the comparison holds where ΦX₀
    // carries the maximum, e.g. the benchmark direction.
    let d = v(&[1.0, 1.0]);
    assert!(fo.omega0.support(&d).unwrap() >= ddt.omega0.support(&d).unwrap());

    let c = v(&[0.5, -2.0]);
    let sys = zero_dynamics(ConvexSet::singleton(c.clone()).unwrap());
    let delta = 0.2;
    let r = first_order(&sys, delta, &opts).unwrap();
    let moved = ConvexSet::sum(sys.x0().clone(), ConvexSet::singleton(&c * delta).unwrap()).unwrap();
    same_support(&r.omega0, &ConvexSet::hull(sys.x0().clone(), moved).unwrap(), 1e-12);

    let tiny = first_order(&homog_osc(), 1e-10, &opts).unwrap();
    let d = v(&[1.0, 1.0]);
    assert!((tiny.omega0.support(&d).unwrap() - 10.2).abs() < 1e-7);
}

fn nilpotent() -> LinearSystem {
    let x0 = ConvexSet::hyperrectangle(v(&[1.0, 2.0]), v(&[0.3, 0.1])).unwrap();
    LinearSystem::homogeneous(m2([0.0, 1.0, 0.0, 0.0]), x0).unwrap()
}

#[test]
fn vanishing_bloat_reduces_to_plain_hull() {
    let sys = nilpotent();
    let delta = 0.4;
    let phi = transition(&sys, delta).unwrap();
    let plain = ConvexSet::hull(sys.x0().clone(), ConvexSet::map(phi, sys.x0().clone()).unwrap()).unwrap();
    let opts = DiscretizeOptions::default();
    let fw = forward_only(&sys, delta, &opts).unwrap();
    let bw = backward_only(&sys, delta).unwrap();
    let fb = forward_backward(&sys, delta).unwrap();
    same_support(&fw.omega0, &plain, 1e-12);
    same_support(&bw.omega0, &fw.omega0, 1e-12);
    same_support(&fb.omega0, &plain, 1e-12);
}

#[test]
fn fb_sweep_and_soundness() {
    let sys = homog_osc();
    let opts = DiscretizeOptions::default();
    let d = v(&[1.0, 1.0]);
    for i in 0..15 {
        let delta = 10f64.powf(-1.0 - i as f64 * 0.3);
        let fb = forward_backward(&sys, delta).unwrap().omega0.support(&d).unwrap();
        let fw = forward_only(&sys, delta, &opts).unwrap().omega0.support(&d).unwrap();
        assert!(fb <= fw + 1e-9);
    }
    let tdof = lti_reach::models::tdof().unwrap();
    let r = forward_only(&tdof, 1e-5, &opts).unwrap();
    assert!(audit_enclosure(&tdof, &r.omega0, 1e-5, &AuditConfig::default()).unwrap().passed());
    let r = backward_only(&sys, 0.01).unwrap();
    assert!(audit_enclosure(&sys, &r.omega0, 0.01, &AuditConfig::default()).unwrap().passed());
}

#[test]
fn intersection_examples() {
    let sys = homog_osc();
    let opts = DiscretizeOptions::default();
    let fw = forward_only(&sys, 0.05, &opts).unwrap();
    let selfcap = combine_intersection(vec![fw.clone(), fw.clone()]).unwrap();
    same_support(&selfcap.omega0, &fw.omega0, 0.0);

    let d = v(&[1.0, 1.0]);
    let mut narrowed = 0;
    for i in 0..20 {
        let delta = 10f64.powf(-0.5 - i as f64 * 0.2);
        let f = forward_only(&sys, delta, &opts).unwrap();
        let b = backward_only(&sys, delta).unwrap();
        let exact = forward_backward(&sys, delta).unwrap().omega0.support(&d).unwrap();
        let (sf, sb) = (f.omega0.support(&d).unwrap(), b.omega0.support(&d).unwrap());
        let cap = combine_intersection(vec![f, b]).unwrap().omega0.support(&d).unwrap();
        assert!(cap <= sf && cap <= sb);
        let gap = cap - exact;
        assert!(gap <= (sf - exact).min(sb - exact) + 1e-12);
        if gap < (sf - exact).max(sb - exact) {
            narrowed += 1;
        }
    }
    assert!(narrowed > 0);
}

#[test]
fn input_set_examples() {
    let (hv, _) = input_set_v(&homog_osc(), 0.1).unwrap();
    assert!(hv.is_origin());

    let u = ConvexSet::hyperrectangle(v(&[0.5, 0.0]), v(&[0.1, 0.2])).unwrap();
    let sys = zero_dynamics(u.clone());
    let (vz, _) = input_set_v(&sys, 0.3).unwrap();
    same_support(&vz, &ConvexSet::scale(0.3, u).unwrap(), 1e-12);

    let het = osc_with_box_input();
    let (vset, _) = input_set_v(&het, 0.01).unwrap();
    let from_zero = het.with_x0(ConvexSet::origin(2)).unwrap();
    let rep = audit_enclosure(&from_zero, &vset, 0.01, &AuditConfig::default()).unwrap();
    assert!(rep.passed(), "{rep:?}");
}

#[test]
fn underapprox_without_shrink_is_plain_hull() {
    let sys = LinearSystem::homogeneous(Matrix::zeros(2, 2), x0_osc()).unwrap();
    let s = ddt_shrink_underapprox(&sys, 0.1).unwrap();
    same_support(&s, sys.x0(), 1e-12);
}

// ---- transformations ----

#[test]
fn homogenize_homogeneous_system() {
    let (h, info) = homogenize(&homog_osc(), 3.0).unwrap();
    assert_eq!(h.dim(), 3);
    let c = h.a();
    assert!(c.row(2).iter().all(|&x| x == 0.0) && c.column(2).iter().all(|&x| x == 0.0));
    assert_eq!(c.view((0, 0), (2, 2)), osc_a());
    assert_eq!(info.aux_value, 3.0);
    assert_eq!(h.x0().support(&v(&[0.0, 0.0, 1.0])).unwrap(), 3.0);
    assert_eq!(h.x0().support(&v(&[0.0, 0.0, -1.0])).unwrap(), -3.0);
}

#[test]
fn homogenized_trajectories_match_affine_flow() {
    use rand::Rng;
    let f = 1.0;
    let sys = oscillator(f, 0.0).unwrap();
    for alpha in [1.0, 2.0] {
        let (h, _) = homogenize(&sys, alpha).unwrap();
        let col = h.a().column(2).into_owned();
        assert!((col - v(&[0.0, f / alpha, 0.0])).amax() == 0.0);

        let c = v(&[0.0, f]);
        let mut g = rng(12);
        let times: Vec<f64> = (1..=50).map(|i| i as f64 * 0.02).collect();
        let lifted: Vec<Matrix> = times.iter().map(|&t| transition(&h, t).unwrap()).collect();
        let plain: Vec<_> = times
            .iter()
            .map(|&t| transmission_matrices(sys.a(), t).unwrap())
            .collect();
        for _ in 0..100 {
            let x = v(&[g.random_range(-1.0..1.0), g.random_range(9.0..11.0)]);
            let y0 = v(&[x[0], x[1], alpha]);
            for (ph, tm) in lifted.iter().zip(&plain) {
                let want = &tm.phi * &x + &tm.phi1 * &c;
                let got = ph * &y0;
                assert!((got.rows(0, 2) - want).amax() < 1e-10);
            }
        }
    }
}

#[test]
fn projection_examples() {
    let sys = oscillator(1.0, 0.0).unwrap();
    let (h, info) = homogenize(&sys, 1.0).unwrap();
    let back = project_out_aux(h.x0(), &info).unwrap();
    same_support(&back, sys.x0(), 1e-15);

    let z = ConvexSet::zonotope(v(&[1.0, 2.0, 1.0]), Matrix::from_row_slice(3, 2, &[1.0, 0.0, 0.5, 2.0, 0.0, 0.0])).unwrap();
    match project_out_aux(&z, &info).unwrap() {
        ConvexSet::Zonotope(p) => {
            assert_eq!(p.center, v(&[1.0, 2.0]));
            assert_eq!(p.generators, m2([1.0, 0.0, 0.5, 2.0]));
        }
        other => panic!("expected a zonotope, got {}", other.describe()),
    }

    // A lazy set projects through the support recursion.
    let lazy = ConvexSet::sum(z.clone(), ConvexSet::ball(Norm::Two, Vector::zeros(3), 0.5).unwrap()).unwrap();
    let p = project_out_aux(&lazy, &info).unwrap();
    let zp = ConvexSet::zonotope(v(&[1.0, 2.0]), m2([1.0, 0.0, 0.5, 2.0])).unwrap();
    let want = ConvexSet::sum(zp, ConvexSet::ball(Norm::Two, Vector::zeros(2), 0.5).unwrap()).unwrap();
    same_support(&p, &want, 1e-12);
}

#[test]
fn propagate_examples() {
    let omega0: ConvexSet = Hyperrectangle::new(v(&[1.0, 0.0]), v(&[0.1, 0.2])).unwrap().into();
    let phi = mat_exp(&(osc_a() * 0.1)).unwrap();
    let seq = propagate(&phi, &omega0, &ConvexSet::origin(2), 2).unwrap();
    assert_eq!(seq.len(), 2);
    same_support(&seq[0], &omega0, 0.0);
    same_support(&seq[1], &ConvexSet::map(phi.clone(), omega0.clone()).unwrap(), 1e-15);

    let step = v(&[0.5, -1.0]);
    let seq = propagate(&Matrix::identity(2, 2), &omega0, &ConvexSet::singleton(step.clone()).unwrap(), 3).unwrap();
    for (j, s) in seq.iter().enumerate() {
        let shifted = ConvexSet::sum(omega0.clone(), ConvexSet::singleton(&step * j as f64).unwrap()).unwrap();
        same_support(s, &shifted, 1e-14);
    }

    let vset = ConvexSet::ball(Norm::Two, Vector::zeros(2), 0.05).unwrap();
    let k = 6;
    let seq = propagate(&phi, &omega0, &vset, k).unwrap();
    let last = &seq[k - 1];
    for d in random_directions(2, 30, &mut rng(13)) {
        let mut dj = d.clone();
        let mut acc = 0.0;
        for _ in 0..k - 1 {
            acc += vset.support(&dj).unwrap();
            dj = phi.transpose() * dj;
        }
        let want = omega0.support(&dj).unwrap() + acc;
        assert!((last.support(&d).unwrap() - want).abs() < 1e-12);
    }
}

#[test]
fn shrink_with_one_step_is_plain() {
    let sys = homog_osc();
    let opts = DiscretizeOptions::default();
    let a = shrink_time_step(&sys, 0.05, 1, &Method::ForwardOnly, &opts).unwrap();
    let b = discretize(&sys, 0.05, &Method::ForwardOnly, &opts).unwrap();
    same_support(&a.omega0, &b.omega0, 0.0);
}
