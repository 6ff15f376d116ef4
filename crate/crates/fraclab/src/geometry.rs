//! Points, directions, projections and level-set geometry.
//!
//! Grid quantities (dyadic points, covers) are exact integer arithmetic;
//! analytic quantities (norms, dot products) are `f64` with a 1e-12 slack.
//! All precisions are bits, base 2. Nonintegral precision parameters are
//! rounded up to the next integer.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::GeometryError;

/// Tolerance for unit-norm and level-set checks on `f64` quantities.
pub const ANALYTIC_TOL: f64 = 1e-12;

/// A point of `R^n` on the dyadic grid at some precision: coordinate `i`
/// denotes `mantissas[i] * 2^-precision`.
///
/// Two points compare equal iff they denote the same real vector, so the
/// stored form is always normalized (minimal precision).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicPoint {
    mantissas: Vec<i64>,
    precision: u32,
}

impl DyadicPoint {
    pub fn new(mantissas: Vec<i64>, precision: u32) -> Self {
        assert!(!mantissas.is_empty(), "zero-dimensional point");
        let mut p = DyadicPoint {
            mantissas,
            precision,
        };
        p.normalize();
        p
    }

    pub fn origin(dim: usize) -> Self {
        DyadicPoint::new(vec![0; dim], 0)
    }

    fn normalize(&mut self) {
        while self.precision > 0 && self.mantissas.iter().all(|m| m % 2 == 0) {
            for m in &mut self.mantissas {
                *m /= 2;
            }
            self.precision -= 1;
        }
    }

    pub fn dim(&self) -> usize {
        self.mantissas.len()
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn mantissas(&self) -> &[i64] {
        &self.mantissas
    }

    pub fn coords(&self) -> Vec<f64> {
        let scale = f64::powi(2.0, -(self.precision as i32));
        self.mantissas.iter().map(|&m| (m as f64) * scale).collect()
    }

    /// Componentwise sum; the result lives at the finer of the two precisions.
    pub fn add(&self, other: &DyadicPoint) -> Option<DyadicPoint> {
        if self.dim() != other.dim() {
            return None;
        }
        let prec = self.precision.max(other.precision);
        let sa = prec - self.precision;
        let sb = prec - other.precision;
        if sa > 62 || sb > 62 {
            return None;
        }
        let mut m = Vec::with_capacity(self.dim());
        for i in 0..self.dim() {
            let a = self.mantissas[i].checked_shl(sa)?;
            let b = other.mantissas[i].checked_shl(sb)?;
            m.push(a.checked_add(b)?);
        }
        Some(DyadicPoint::new(m, prec))
    }

    /// Concatenation of coordinates, as a point of the product space.
    pub fn concat(&self, other: &DyadicPoint) -> DyadicPoint {
        let prec = self.precision.max(other.precision);
        let mut m: Vec<i64> = self
            .mantissas
            .iter()
            .map(|&v| v << (prec - self.precision))
            .collect();
        m.extend(
            other
                .mantissas
                .iter()
                .map(|&v| v << (prec - other.precision)),
        );
        DyadicPoint::new(m, prec)
    }

    /// Euclidean distance to a real vector. Panics on dimension mismatch.
    pub fn distance_to(&self, x: &[f64]) -> f64 {
        assert_eq!(self.dim(), x.len(), "dimension mismatch");
        let c = self.coords();
        c.iter()
            .zip(x)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

impl fmt::Display for DyadicPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.coords();
        write!(f, "(")?;
        for (i, v) in c.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")@2^-{}", self.precision)
    }
}

/// A unit vector of `R^n`, i.e. a point on the sphere `S^{n-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    components: Vec<f64>,
}

impl Direction {
    /// Validates the unit-norm invariant to within 1e-12.
    pub fn new(components: Vec<f64>) -> Result<Self, GeometryError> {
        if components.is_empty() {
            return Err(GeometryError::EmptyDirection);
        }
        let norm = components.iter().map(|c| c * c).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > ANALYTIC_TOL {
            return Err(GeometryError::NotUnit { norm });
        }
        Ok(Direction { components })
    }

    /// Normalizes an arbitrary nonzero vector onto the sphere.
    pub fn normalized(components: Vec<f64>) -> Result<Self, GeometryError> {
        let norm = components.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(GeometryError::ZeroVector);
        }
        Ok(Direction {
            components: components.into_iter().map(|c| c / norm).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e=(")?;
        for (i, v) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v:.6}")?;
        }
        write!(f, ")")
    }
}

/// Negative binary log of a Euclidean distance, in bits. The +inf sentinel
/// marks coincident points.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogDistance(pub f64);

impl LogDistance {
    pub fn is_infinite(&self) -> bool {
        self.0.is_infinite()
    }
}

/// The projection coordinate `e . x` of `x` onto the line through `e`.
///
/// Panics if dimensions disagree.
pub fn dot(e: &Direction, x: &[f64]) -> f64 {
    assert_eq!(e.dim(), x.len(), "dimension mismatch in dot");
    e.components.iter().zip(x).map(|(a, b)| a * b).sum()
}

/// `t = -log2 ||z - w||`; +inf sentinel when `z = w`.
///
/// Panics if dimensions disagree.
pub fn log_distance(z: &[f64], w: &[f64]) -> LogDistance {
    assert_eq!(z.len(), w.len(), "dimension mismatch in log_distance");
    let d2: f64 = z.iter().zip(w).map(|(a, b)| (a - b) * (a - b)).sum();
    if d2 == 0.0 {
        LogDistance(f64::INFINITY)
    } else {
        LogDistance(-0.5 * d2.log2())
    }
}

/// The closest point to `p` on the level set `{w : e . w = q}`, namely
/// `w = p + (q - e.p) e`, with `||p - w|| = |q - e.p|`.
pub fn nearest_on_level_set(p: &[f64], e: &Direction, q: f64) -> Vec<f64> {
    assert_eq!(
        p.len(),
        e.dim(),
        "dimension mismatch in nearest_on_level_set"
    );
    let gap = q - dot(e, p);
    p.iter()
        .zip(e.components())
        .map(|(pi, ei)| pi + gap * ei)
        .collect()
}

/// Uniform sample from `S^{n-1}`: normalize a vector of independent standard
/// normals. Deterministic under a fixed RNG state. Requires `n >= 2`.
pub fn sample_direction<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> Direction {
    assert!(n >= 2, "sample_direction requires n >= 2");
    use rand_distr::{Distribution, StandardNormal};
    loop {
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        if let Ok(d) = Direction::normalized(v) {
            return d;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dot_axis_aligned() {
        let e = Direction::new(vec![1.0, 0.0]).unwrap();
        assert_eq!(dot(&e, &[0.5, 0.7]), 0.5);
    }

    #[test]
    fn dot_three_four_five() {
        let e = Direction::new(vec![3.0 / 5.0, 4.0 / 5.0]).unwrap();
        assert!((dot(&e, &[5.0, 5.0]) - 7.0).abs() < 1e-12);
    }

    #[test]
    fn dot_orthogonal_diagonal() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let e = Direction::new(vec![s, -s]).unwrap();
        for c in [0.3, -2.0, 17.5] {
            assert!(dot(&e, &[c, c]).abs() < 1e-12);
        }
    }

    #[test]
    fn log_distance_values() {
        assert_eq!(log_distance(&[0.0, 0.0], &[0.0, 1.0]).0, 0.0);
        assert_eq!(log_distance(&[0.0, 0.0], &[0.0, 2f64.powi(-5)]).0, 5.0);
        assert!(log_distance(&[1.0, 2.0], &[1.0, 2.0]).is_infinite());
    }

    #[test]
    fn nearest_on_level_set_axis() {
        let e = Direction::new(vec![1.0, 0.0]).unwrap();
        let w = nearest_on_level_set(&[0.0, 0.0], &e, 0.25);
        assert_eq!(w, vec![0.25, 0.0]);
    }

    #[test]
    fn nearest_on_level_set_diagonal() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let e = Direction::new(vec![s, s]).unwrap();
        // p - (e.p) e with p = (1,1): e.p = sqrt(2), w = (0,0).
        let w = nearest_on_level_set(&[1.0, 1.0], &e, 0.0);
        assert!(w[0].abs() < 1e-12 && w[1].abs() < 1e-12);
    }

    #[test]
    fn nearest_on_level_set_fixed_point() {
        let e = Direction::new(vec![0.6, 0.8]).unwrap();
        let p = [0.3, -0.9];
        let q = dot(&e, &p);
        let w = nearest_on_level_set(&p, &e, q);
        assert!((w[0] - p[0]).abs() < 1e-12 && (w[1] - p[1]).abs() < 1e-12);
    }

    #[test]
    fn sample_direction_deterministic_and_unit() {
        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        let da = sample_direction(3, &mut a);
        let db = sample_direction(3, &mut b);
        assert_eq!(da.components(), db.components());
        let norm: f64 = da.components().iter().map(|c| c * c).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn sample_direction_mean_near_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut sums = [0.0f64; 2];
        let n = 10_000;
        for _ in 0..n {
            let d = sample_direction(2, &mut rng);
            sums[0] += d.components()[0];
            sums[1] += d.components()[1];
        }
        assert!(sums[0].abs() / n as f64 <= 0.05);
        assert!(sums[1].abs() / n as f64 <= 0.05);
    }

    #[test]
    fn dyadic_equality_across_precisions() {
        let a = DyadicPoint::new(vec![1, 2], 1); // (0.5, 1.0)
        let b = DyadicPoint::new(vec![2, 4], 2); // (0.5, 1.0)
        let c = DyadicPoint::new(vec![3, 4], 2); // (0.75, 1.0)
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn dyadic_add_aligns_precisions() {
        let a = DyadicPoint::new(vec![1], 1); // 0.5
        let b = DyadicPoint::new(vec![1], 3); // 0.125
        let s = a.add(&b).unwrap();
        assert_eq!(s, DyadicPoint::new(vec![5], 3)); // 0.625
    }

    proptest! {
        #[test]
        fn projection_is_1lipschitz(
            x in proptest::collection::vec(-100.0f64..100.0, 2..5),
            y_seed in proptest::collection::vec(-100.0f64..100.0, 2..5),
            seed in 0u64..1000,
        ) {
            let n = x.len().min(y_seed.len());
            let x = &x[..n];
            let y = &y_seed[..n];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let e = sample_direction(n, &mut rng);
            let lhs = (dot(&e, x) - dot(&e, y)).abs();
            let rhs: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            prop_assert!(lhs <= rhs + 1e-9 * (1.0 + rhs));
        }

        #[test]
        fn nearest_on_level_set_contracts(
            p in proptest::collection::vec(-10.0f64..10.0, 2..5),
            q in -10.0f64..10.0,
            seed in 0u64..1000,
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let e = sample_direction(p.len(), &mut rng);
            let w = nearest_on_level_set(&p, &e, q);
            prop_assert!((dot(&e, &w) - q).abs() <= 1e-9);
            let dist: f64 = p.iter().zip(&w).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            prop_assert!(dist <= (q - dot(&e, &p)).abs() + 1e-9);
        }

        #[test]
        fn log_distance_symmetric_translation_invariant(
            z in proptest::collection::vec(-10.0f64..10.0, 1..4),
            w_off in proptest::collection::vec(-10.0f64..10.0, 1..4),
            v in proptest::collection::vec(-5.0f64..5.0, 1..4),
        ) {
            let n = z.len().min(w_off.len()).min(v.len());
            let z = &z[..n];
            let w: Vec<f64> = w_off[..n].to_vec();
            let a = log_distance(z, &w);
            let b = log_distance(&w, z);
            prop_assert_eq!(a.0.to_bits(), b.0.to_bits());
            let zt: Vec<f64> = z.iter().zip(&v[..n]).map(|(a, b)| a + b).collect();
            let wt: Vec<f64> = w.iter().zip(&v[..n]).map(|(a, b)| a + b).collect();
            let c = log_distance(&zt, &wt);
            if a.is_infinite() {
                prop_assert!(c.is_infinite() || c.0 > 40.0);
            } else {
                prop_assert!((a.0 - c.0).abs() <= 1e-6 * (1.0 + a.0.abs()));
            }
        }
    }
}
