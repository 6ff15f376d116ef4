//! Recovering the projection direction from two points on a common level
//! set, given only finite-precision approximations, with a verified error
//! bound.
//!
//! Two points `z, w` with `e.z = e.w` pin `e` down to a quadratic: after
//! permuting coordinates so the largest gap sits first and an opposite-sign
//! gap second, the second component solves `a e2^2 + b e2 + c = 0` with
//! coefficients built from the gaps and the remaining components. Feeding in
//! r-approximations of `z` and `w` perturbs the root by at most
//! `2^(-r + t + alpha)` where `t = -log2 ||z - w||`.

use rand::Rng;
use serde::Serialize;

use crate::error::RecoveryError;
use crate::geometry::{dot, log_distance, sample_direction, Direction};

/// Frozen error-bound exponents per ambient dimension (n = 2, 3, 4), fitted
/// once on a seeded calibration sweep (r = 30, t in [1, 15], 4000 instances
/// per dimension; worst required exponents were 0.19, 2.66 and 5.06) and
/// kept with roughly two bits of headroom over the worst observed instance.
pub const ALPHA_BY_DIM: [(usize, f64); 3] = [(2, 4.0), (3, 6.0), (4, 7.0)];

pub fn alpha_for_dim(n: usize) -> f64 {
    ALPHA_BY_DIM
        .iter()
        .find(|(d, _)| *d == n)
        .map(|(_, a)| *a)
        .unwrap_or(8.0)
}

const LEVEL_TOL: f64 = 1e-12;

/// Index pair for the quadratic construction: `i` maximizes the coordinate
/// gap `|z_i - w_i|` (lowest index on ties); `j` has a strictly positive gap
/// with `(z_j - w_j) e_j` of sign opposite to `(z_i - w_i) e_i`. Indices are
/// 0-based.
pub fn select_indices(
    z: &[f64],
    w: &[f64],
    e: &Direction,
) -> Result<(usize, usize), RecoveryError> {
    assert_eq!(z.len(), w.len());
    assert_eq!(z.len(), e.dim());
    let gaps: Vec<f64> = z.iter().zip(w).map(|(a, b)| a - b).collect();
    if gaps.iter().all(|g| *g == 0.0) {
        return Err(RecoveryError::IdenticalPoints);
    }
    let level_gap = dot(e, &gaps);
    if level_gap.abs() > LEVEL_TOL {
        return Err(RecoveryError::NotOnLevelSet(level_gap));
    }
    let mut i = 0;
    for (k, g) in gaps.iter().enumerate() {
        if g.abs() > gaps[i].abs() {
            i = k;
        }
    }
    let si = gaps[i] * e.components()[i];
    let mut j = None;
    for (k, g) in gaps.iter().enumerate() {
        if k == i || g.abs() == 0.0 {
            continue;
        }
        let sk = g * e.components()[k];
        if si * sk < 0.0 && sk.abs() > LEVEL_TOL {
            j = Some(k);
            break;
        }
    }
    match j {
        Some(j) => Ok((i, j)),
        None => Err(RecoveryError::NoOppositeSign),
    }
}

/// Root of the approximate quadratic: inputs are already permuted so the
/// selected indices sit at positions 0 and 1. `q` approximates `z`, `p`
/// approximates `w`, `d` approximates the remaining components
/// `(e_3, ..., e_n)`, and `h` selects the root via `(-1)^h`.
pub fn recover_e2(q: &[f64], p: &[f64], d: &[f64], h: u8) -> Result<f64, RecoveryError> {
    assert_eq!(q.len(), p.len());
    assert_eq!(d.len() + 2, q.len());
    let g1 = q[0] - p[0];
    let g2 = p[1] - q[1];
    let s: f64 = (2..q.len()).map(|i| (p[i] - q[i]) * d[i - 2]).sum();
    let d2: f64 = d.iter().map(|v| v * v).sum();
    let a = g1 * g1 + g2 * g2;
    let b = 2.0 * g2 * s;
    let c = s * s + g1 * g1 * (d2 - 1.0);
    if a == 0.0 {
        return Err(RecoveryError::DegenerateInstance);
    }
    let mut disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        if disc < -1e-12 {
            return Err(RecoveryError::InconsistentApproximation(disc));
        }
        disc = 0.0;
    }
    let sign = if h.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok((-b + sign * disc.sqrt()) / (2.0 * a))
}

/// One verification instance: exact level-set pair plus its approximations.
#[derive(Debug, Clone, Serialize)]
pub struct RecoveryInstance {
    pub z: Vec<f64>,
    pub w: Vec<f64>,
    pub e: Vec<f64>,
    pub r: u32,
    /// r-approximation of `z`.
    pub q: Vec<f64>,
    /// r-approximation of `w`.
    pub p: Vec<f64>,
    /// Approximation of the permuted trailing components of `e`.
    pub d: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RecoveryReport {
    pub n: usize,
    pub r: u32,
    pub t: f64,
    pub error: f64,
    pub bound: f64,
    pub pass: bool,
    /// `t` close to `r`: the bound exceeds the coordinate range and carries
    /// no information.
    pub uninformative: bool,
    pub recovered: f64,
    pub truth: f64,
}

fn permute<T: Copy>(v: &[T], order: &[usize]) -> Vec<T> {
    order.iter().map(|&i| v[i]).collect()
}

fn permutation(n: usize, i: usize, j: usize) -> Vec<usize> {
    let mut order = vec![i, j];
    order.extend((0..n).filter(|&k| k != i && k != j));
    order
}

/// Runs the full recovery on an instance and checks the error against the
/// frozen bound `2^(-r + t + alpha(n))`.
pub fn verify_direction_recovery(
    instance: &RecoveryInstance,
) -> Result<RecoveryReport, RecoveryError> {
    let n = instance.z.len();
    let t = log_distance(&instance.z, &instance.w);
    if t.is_infinite() {
        return Err(RecoveryError::IdenticalPoints);
    }
    let t = t.0;
    if t <= 0.0 || t > instance.r as f64 {
        return Err(RecoveryError::BadLogDistance { t });
    }
    let e = Direction::new(instance.e.clone()).map_err(|_| RecoveryError::DegenerateInstance)?;
    let (i, j) = select_indices(&instance.z, &instance.w, &e)?;
    let order = permutation(n, i, j);
    let qp = permute(&instance.q, &order);
    let pp = permute(&instance.p, &order);
    let ep = permute(&instance.e, &order);
    // root sign is determined by the true second component: the exact
    // quadratic has c < 0, so its roots have opposite signs
    let h = if ep[1] >= 0.0 { 0 } else { 1 };
    let recovered = recover_e2(&qp, &pp, &instance.d, h)?;
    let truth = ep[1];
    let error = (recovered - truth).abs();
    let alpha = alpha_for_dim(n);
    let bound = f64::powf(2.0, -(instance.r as f64) + t + alpha);
    Ok(RecoveryReport {
        n,
        r: instance.r,
        t,
        error,
        bound,
        pass: error <= bound,
        uninformative: bound >= 1.0,
        recovered,
        truth,
    })
}

/// Uniform point of the ball of radius `rad`.
fn ball_noise<R: Rng + ?Sized>(n: usize, rad: f64, rng: &mut R) -> Vec<f64> {
    let dir = sample_direction(n.max(2), rng);
    let u: f64 = rng.gen_range(0.0..1.0f64);
    let scale = rad * u.powf(1.0 / n as f64);
    dir.components()[..n].iter().map(|c| c * scale).collect()
}

/// Draws a seeded instance: a random pair at log-distance `t` on a common
/// level set of a random direction, with independently perturbed
/// r-approximations. Degenerate draws (no opposite-sign coordinate) are
/// rejected and resampled.
pub fn sample_instance<R: Rng + ?Sized>(
    n: usize,
    r: u32,
    t_lo: f64,
    t_hi: f64,
    exact_inputs: bool,
    rng: &mut R,
) -> RecoveryInstance {
    assert!(n >= 2);
    loop {
        let z: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let e = sample_direction(n, rng);
        // random unit vector orthogonal to e
        let raw = sample_direction(n, rng);
        let along = dot(&e, raw.components());
        let v: Vec<f64> = raw
            .components()
            .iter()
            .zip(e.components())
            .map(|(u, ei)| u - along * ei)
            .collect();
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-6 {
            continue;
        }
        let t = rng.gen_range(t_lo..=t_hi);
        let dist = f64::powf(2.0, -t);
        let w: Vec<f64> = z
            .iter()
            .zip(&v)
            .map(|(zi, vi)| zi + dist * vi / norm)
            .collect();

        let dir = match Direction::new(e.components().to_vec()) {
            Ok(d) => d,
            Err(_) => continue,
        };
        let (i, j) = match select_indices(&z, &w, &dir) {
            Ok(ij) => ij,
            Err(_) => continue,
        };
        let order = permutation(n, i, j);
        let ep = permute(e.components(), &order);

        let rad = f64::powi(2.0, -(r as i32));
        let (q, p, d) = if exact_inputs {
            (z.clone(), w.clone(), ep[2..].to_vec())
        } else {
            let q: Vec<f64> = z
                .iter()
                .zip(ball_noise(n, rad, rng))
                .map(|(a, b)| a + b)
                .collect();
            let p: Vec<f64> = w
                .iter()
                .zip(ball_noise(n, rad, rng))
                .map(|(a, b)| a + b)
                .collect();
            let d_rad = f64::powf(2.0, -((n as u32 * r) as f64)).max(1e-300);
            let d: Vec<f64> = ep[2..]
                .iter()
                .map(|c| c + rng.gen_range(-d_rad..=d_rad))
                .collect();
            (q, p, d)
        };
        return RecoveryInstance {
            z,
            w,
            e: e.components().to_vec(),
            r,
            q,
            p,
            d,
        };
    }
}
