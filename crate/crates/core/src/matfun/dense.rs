use super::{ensure_square, ensure_step, norm_one, MatFunError};
use crate::Matrix;

const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.539398330063230e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068e0;
const THETA_13: f64 = 5.371920351148152e0;

const PADE_3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE_5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE_7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const PADE_9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE_13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Matrix exponential by Padé scaling and squaring (Higham 2005).
pub fn mat_exp(m: &Matrix) -> Result<Matrix, MatFunError> {
    let n = ensure_square(m)?;
    if n == 0 {
        return Ok(Matrix::zeros(0, 0));
    }
    let norm = norm_one(m);
    let result = if norm <= THETA_3 {
        pade_low(m, &PADE_3)?
    } else if norm <= THETA_5 {
        pade_low(m, &PADE_5)?
    } else if norm <= THETA_7 {
        pade_low(m, &PADE_7)?
    } else if norm <= THETA_9 {
        pade_low(m, &PADE_9)?
    } else {
        let s = if norm > THETA_13 {
            (norm / THETA_13).log2().ceil().max(0.0) as i32
        } else {
            0
        };
        let scaled = m * 2f64.powi(-s);
        let mut r = pade_13(&scaled)?;
        for _ in 0..s {
            r = &r * &r;
        }
        r
    };
    if result.iter().all(|x| x.is_finite()) {
        Ok(result)
    } else {
        Err(MatFunError::Overflow)
    }
}

fn pade_low(a: &Matrix, b: &[f64]) -> Result<Matrix, MatFunError> {
    let n = a.nrows();
    let id = Matrix::identity(n, n);
    let a2 = a * a;
    let mut odd = &id * b[1];
    let mut even = &id * b[0];
    let mut pow = id.clone();
    for k in 1..b.len() / 2 {
        pow = &pow * &a2;
        odd += &pow * b[2 * k + 1];
        even += &pow * b[2 * k];
    }
    let u = a * odd;
    solve_pade(&u, &even)
}

fn pade_13(a: &Matrix) -> Result<Matrix, MatFunError> {
    let b = &PADE_13;
    let n = a.nrows();
    let id = Matrix::identity(n, n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = &a6 * b[13] + &a4 * b[11] + &a2 * b[9];
    let u = a * (&a6 * inner_u + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &id * b[1]);
    let inner_v = &a6 * b[12] + &a4 * b[10] + &a2 * b[8];
    let v = &a6 * inner_v + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &id * b[0];
    solve_pade(&u, &v)
}

fn solve_pade(u: &Matrix, v: &Matrix) -> Result<Matrix, MatFunError> {
    let q = v - u;
    let p = v + u;
    q.lu().solve(&p).ok_or(MatFunError::Overflow)
}

/// `Φ = e^{Aδ}`, `Φ₁ = Σ δ^{i+1}/(i+1)! Aⁱ` and `Φ₂ = Σ δ^{i+2}/(i+2)! Aⁱ`.
#[derive(Debug, Clone)]
pub struct Transmission {
    pub phi: Matrix,
    pub phi1: Matrix,
    pub phi2: Matrix,
}

/// Computes `Φ`, `Φ₁`, `Φ₂` together as the blocks of
/// `exp(δ [[A, I, 0], [0, 0, I], [0, 0, 0]])`.
///
/// The 3n block matrix is never formed: its exponential keeps the shape
/// `[[P, Q, R], [0, I, tI], [0, 0, I]]`, so a Taylor core on `tA` with small
/// `t = δ / 2^s` followed by `s` block squarings needs only n×n products.
pub fn transmission_matrices(a: &Matrix, delta: f64) -> Result<Transmission, MatFunError> {
    let n = ensure_square(a)?;
    ensure_step(delta)?;
    let norm = norm_one(a) * delta;
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let t = delta * 2f64.powi(-s);
    let ta = a * t;

    // P = Σ (tA)^k/k!, Q = t Σ (tA)^k/(k+1)!, R = t² Σ (tA)^k/(k+2)!
    let id = Matrix::identity(n, n);
    let mut p = id.clone();
    let mut q = &id * t;
    let mut r = &id * (t * t / 2.0);
    let mut pow = id;
    let mut fact = 1.0;
    for k in 1..=30 {
        pow = &pow * &ta;
        fact /= k as f64;
        let cq = t * fact / (k + 1) as f64;
        let cr = t * cq / (k + 2) as f64;
        p += &pow * fact;
        q += &pow * cq;
        r += &pow * cr;
        // ‖tA‖₁ ≤ 1/2, so the next term is below 2^{-k-1}/(k+1)! relative to I.
        if fact * 0.5f64.powi(k + 1) < 1e-18 {
            break;
        }
    }

    let mut t_cur = t;
    for _ in 0..s {
        let r_next = &p * &r + &q * t_cur + &r;
        let q_next = &p * &q + &q;
        p = &p * &p;
        q = q_next;
        r = r_next;
        t_cur *= 2.0;
    }

    if p.iter().chain(q.iter()).chain(r.iter()).all(|x| x.is_finite()) {
        Ok(Transmission {
            phi: p,
            phi1: q,
            phi2: r,
        })
    } else {
        Err(MatFunError::Overflow)
    }
}

/// `Φ₂(M, δ) = Σ_{i≥0} δ^{i+2}/(i+2)! Mⁱ`.
pub fn phi2(m: &Matrix, delta: f64) -> Result<Matrix, MatFunError> {
    Ok(transmission_matrices(m, delta)?.phi2)
}

/// `Φ₂` read off the top-right block of the explicitly formed 3n×3n
/// exponential. Slower than [`phi2`]; kept as an independent route.
pub fn phi2_block_dense(m: &Matrix, delta: f64) -> Result<Matrix, MatFunError> {
    let n = ensure_square(m)?;
    ensure_step(delta)?;
    let mut big = Matrix::zeros(3 * n, 3 * n);
    big.view_mut((0, 0), (n, n)).copy_from(&(m * delta));
    for i in 0..n {
        big[(i, n + i)] = delta;
        big[(n + i, 2 * n + i)] = delta;
    }
    let e = mat_exp(&big)?;
    Ok(e.view((0, 2 * n), (n, n)).into_owned())
}

/// Truncated series `Σ_{i=0}^{K} δ^{i+2}/(i+2)! Mⁱ` with an ∞-norm bound on
/// the neglected tail, `δ² x^{K+1}/(K+3)! / (1 − x/(K+4))` for `x = ‖M‖∞δ`.
///
/// The bound is `+∞` when `x ≥ K + 4`.
pub fn phi2_series(m: &Matrix, delta: f64, k: usize) -> Result<(Matrix, f64), MatFunError> {
    let n = ensure_square(m)?;
    ensure_step(delta)?;
    let mut sum = Matrix::identity(n, n) * (delta * delta / 2.0);
    let mut pow = Matrix::identity(n, n);
    let mut coeff = delta * delta / 2.0;
    for i in 1..=k {
        pow = &pow * m;
        coeff *= delta / (i + 2) as f64;
        sum += &pow * coeff;
    }
    let x = super::norm_inf(m) * delta;
    let ratio = x / (k + 4) as f64;
    let tail = if ratio >= 1.0 {
        f64::INFINITY
    } else {
        // δ² x^{K+1} / (K+3)!
        let mut lead = delta * delta;
        for j in 1..=k + 1 {
            lead *= x / (j + 2) as f64;
        }
        lead / 2.0 / (1.0 - ratio)
    };
    Ok((sum, tail))
}
