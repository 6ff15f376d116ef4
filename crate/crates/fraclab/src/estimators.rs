//! Scalable complexity estimation of points via an in-repo incremental
//! dictionary compressor.
//!
//! The estimator parses a bit string left to right. At each position the
//! longest phrase seen earlier in the string (self-overlap allowed) is
//! looked up; if it is long enough to pay for its pointer it becomes a match
//! phrase costing `1 + gamma(distance) + gamma(length)` bits, otherwise the
//! bits join a literal run costing `1 + gamma(run) + run` bits. The estimate
//! is the cheaper of the parsed cost and the raw length (one mode bit
//! either way), so incompressible strings stay at ratio ~1 while periodic
//! strings collapse to a few phrases.
//!
//! Everything here is bit-exact and deterministic; the estimator id is part
//! of every result's identity.

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::EstimatorError;
use crate::fractals::IfsSpec;

/// Identifier recorded in profiles and reports.
pub const ESTIMATOR_ID: &str = "lz-self-v1";

/// Hard ceiling on expansion precision.
pub const MAX_ENCODE_PRECISION: u32 = 4096;

/// Matches shorter than this cost more than their literal run; the parser
/// only points at phrases of at least this length.
const MIN_MATCH: usize = 32;

/// Geometric precision schedule `2^5, 2^5.5, ..., 2^12`.
pub fn default_precision_schedule() -> Vec<u32> {
    (0..=14)
        .map(|j| f64::powf(2.0, 5.0 + 0.5 * j as f64).round() as u32)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Interleaved,
    Concatenated,
}

/// The first `r` bits of each coordinate's binary expansion, assembled
/// round-robin (interleaved) or coordinate-major (concatenated).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitEncoding {
    pub bits: Vec<u8>,
    pub scheme: Scheme,
    pub precision: u32,
}

impl BitEncoding {
    pub fn as_string(&self) -> String {
        self.bits
            .iter()
            .map(|&b| if b == 1 { '1' } else { '0' })
            .collect()
    }
}

fn assemble(per_coord: Vec<Vec<u8>>, scheme: Scheme, r: u32) -> BitEncoding {
    let n = per_coord.len();
    let mut bits = Vec::with_capacity(n * r as usize);
    match scheme {
        Scheme::Interleaved => {
            for j in 0..r as usize {
                for c in per_coord.iter() {
                    bits.push(c[j]);
                }
            }
        }
        Scheme::Concatenated => {
            for c in per_coord.iter() {
                bits.extend_from_slice(&c[..r as usize]);
            }
        }
    }
    BitEncoding {
        bits,
        scheme,
        precision: r,
    }
}

/// Binary expansion of the fractional part of an f64 (terminates once the
/// mantissa is exhausted).
fn f64_fraction_bits(x: f64, r: u32) -> Vec<u8> {
    let mut frac = x - x.floor();
    let mut out = Vec::with_capacity(r as usize);
    for _ in 0..r {
        frac *= 2.0;
        if frac >= 1.0 {
            out.push(1);
            frac -= 1.0;
        } else {
            out.push(0);
        }
    }
    out
}

/// First `r` bits of each coordinate of `x` (offset into `[0,1)` by floor),
/// interleaved round-robin.
pub fn encode_point_bits(x: &[f64], r: u32) -> Result<BitEncoding, EstimatorError> {
    if r > MAX_ENCODE_PRECISION {
        return Err(EstimatorError::PrecisionLimit {
            requested: r,
            max: MAX_ENCODE_PRECISION,
        });
    }
    let per_coord: Vec<Vec<u8>> = x.iter().map(|&c| f64_fraction_bits(c, r)).collect();
    Ok(assemble(per_coord, Scheme::Interleaved, r))
}

/// A point whose coordinate expansions can be produced to any precision.
#[derive(Debug, Clone)]
pub enum PointSource {
    /// Plain f64 coordinates; expansions terminate at the mantissa.
    F64(Vec<f64>),
    /// Exact rationals `num/den` in `[0, 1)` per coordinate.
    Rational { nums: Vec<u64>, dens: Vec<u64> },
    /// Independent uniform bits per coordinate, reproducible from the seed.
    SeededRandom { dim: usize, seed: u64 },
    /// A point of a self-similar attractor, by a seeded symbolic address.
    FractalSample {
        numerators: Vec<BigUint>,
        denominator: BigUint,
        dim: usize,
    },
}

impl PointSource {
    pub fn dim(&self) -> usize {
        match self {
            PointSource::F64(v) => v.len(),
            PointSource::Rational { nums, .. } => nums.len(),
            PointSource::SeededRandom { dim, .. } => *dim,
            PointSource::FractalSample { dim, .. } => *dim,
        }
    }

    /// Samples a point of the attractor by walking `depth` seeded address
    /// digits. Requires maps with ratio `1/q` and rational translations
    /// (true of the whole catalog).
    pub fn fractal_sample(ifs: &IfsSpec, seed: u64, precision: u32) -> Option<PointSource> {
        let ratio = ifs.maps[0].ratio;
        let q = (1.0 / ratio).round();
        if !(2.0..=64.0).contains(&q) || (1.0 / ratio - q).abs() > 1e-9 {
            return None;
        }
        if ifs.maps.iter().any(|m| m.ratio != ratio) {
            return None;
        }
        let q = q as u64;
        let n = ifs.dim();
        // translations as a/b with one shared small b
        let mut b = 1u64;
        for m in &ifs.maps {
            for &t in &m.translation {
                let mut found = false;
                for cand in 1..=64u64 {
                    let scaled = t * cand as f64;
                    if (scaled - scaled.round()).abs() < 1e-12 {
                        b = num_integer_lcm(b, cand);
                        found = true;
                        break;
                    }
                }
                if !found {
                    return None;
                }
            }
        }
        let depth = ((precision as f64 + 8.0) / (q as f64).log2()).ceil() as usize + 2;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let digits: Vec<usize> = (0..depth)
            .map(|_| rng.gen_range(0..ifs.maps.len()))
            .collect();

        // x_i = sum_k t[w_k][i] / q^{k-1}; over denominator D = b * q^{depth-1}
        // the numerator is sum_k a_k,i * q^{depth-k} with a = t*b integers.
        let qb = BigUint::from(q);
        let mut numerators = vec![BigUint::from(0u32); n];
        for &d in &digits {
            for i in 0..n {
                let a = (ifs.maps[d].translation[i] * b as f64).round();
                let a = a as i64;
                debug_assert!(a >= 0, "catalog translations are nonnegative");
                numerators[i] = &numerators[i] * &qb + BigUint::from(a as u64);
            }
        }
        let denominator = BigUint::from(b) * qb.pow(depth as u32 - 1);
        Some(PointSource::FractalSample {
            numerators,
            denominator,
            dim: n,
        })
    }

    fn coordinate_bits(&self, coord: usize, r: u32) -> Vec<u8> {
        match self {
            PointSource::F64(v) => f64_fraction_bits(v[coord], r),
            PointSource::Rational { nums, dens } => {
                let mut rem = nums[coord] as u128 % dens[coord] as u128;
                let den = dens[coord] as u128;
                let mut out = Vec::with_capacity(r as usize);
                for _ in 0..r {
                    rem *= 2;
                    if rem >= den {
                        out.push(1);
                        rem -= den;
                    } else {
                        out.push(0);
                    }
                }
                out
            }
            PointSource::SeededRandom { seed, .. } => {
                // one independent stream per coordinate keeps expansions
                // stable as r grows
                let mut rng = ChaCha8Rng::seed_from_u64(
                    seed ^ (0x9e37_79b9_7f4a_7c15u64.wrapping_mul(coord as u64 + 1)),
                );
                (0..r).map(|_| rng.gen_range(0..2u8)).collect()
            }
            PointSource::FractalSample {
                numerators,
                denominator,
                ..
            } => {
                let mut rem = &numerators[coord] % denominator;
                let mut out = Vec::with_capacity(r as usize);
                for _ in 0..r {
                    rem <<= 1;
                    if rem >= *denominator {
                        out.push(1);
                        rem -= denominator;
                    } else {
                        out.push(0);
                    }
                }
                out
            }
        }
    }

    pub fn encode(&self, r: u32, scheme: Scheme) -> Result<BitEncoding, EstimatorError> {
        if r > MAX_ENCODE_PRECISION {
            return Err(EstimatorError::PrecisionLimit {
                requested: r,
                max: MAX_ENCODE_PRECISION,
            });
        }
        let per: Vec<Vec<u8>> = (0..self.dim())
            .map(|i| self.coordinate_bits(i, r))
            .collect();
        Ok(assemble(per, scheme, r))
    }
}

fn num_integer_lcm(a: u64, b: u64) -> u64 {
    fn gcd(mut a: u64, mut b: u64) -> u64 {
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        a
    }
    a / gcd(a, b) * b
}

fn gamma_len(k: u64) -> u64 {
    debug_assert!(k >= 1);
    2 * (63 - k.leading_zeros() as u64) + 1
}

/// Longest match of `t[i..]` against an earlier start (self-overlap allowed).
fn longest_match(t: &[u8], i: usize) -> (usize, usize) {
    let mut best_len = 0usize;
    let mut best_j = 0usize;
    let n = t.len();
    for j in (0..i).rev() {
        if best_len > 0 && (i + best_len >= n || t[j + best_len] != t[i + best_len]) {
            continue;
        }
        let mut u = 0usize;
        while i + u < n && t[j + u] == t[i + u] {
            u += 1;
        }
        if u > best_len {
            best_len = u;
            best_j = j;
        }
    }
    (best_len, best_j)
}

/// Estimated description length of a bit string in bits.
///
/// Deterministic and subadditive up to a logarithmic term in the length.
pub fn dictionary_complexity(bits: &[u8]) -> f64 {
    let n = bits.len();
    if n == 0 {
        return 0.0;
    }
    let mut parsed: u64 = 0;
    let mut i = 0usize;
    let mut literal_run = 0u64;
    while i < n {
        let (len, j) = longest_match(bits, i);
        if len >= MIN_MATCH {
            if literal_run > 0 {
                parsed += 1 + gamma_len(literal_run) + literal_run;
                literal_run = 0;
            }
            parsed += 1 + gamma_len((i - j) as u64) + gamma_len(len as u64);
            i += len;
        } else {
            literal_run += 1;
            i += 1;
        }
    }
    if literal_run > 0 {
        parsed += 1 + gamma_len(literal_run) + literal_run;
    }
    let raw = n as u64;
    (1 + parsed.min(raw)) as f64
}

/// Estimated bits `k_r` per precision, for one point and one estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityProfile {
    pub samples: Vec<(u32, f64)>,
    pub estimator_id: String,
    pub ambient_dim: usize,
}

impl ComplexityProfile {
    /// CSV export: `r,k_r`.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "r,k_r")?;
        for (r, k) in &self.samples {
            writeln!(w, "{r},{k}")?;
        }
        Ok(())
    }
}

/// Profiles a point over the precision schedule.
pub fn complexity_profile(
    source: &PointSource,
    schedule: &[u32],
) -> Result<ComplexityProfile, EstimatorError> {
    let mut samples = Vec::with_capacity(schedule.len());
    for &r in schedule {
        let enc = source.encode(r, Scheme::Interleaved)?;
        samples.push((r, dictionary_complexity(&enc.bits)));
    }
    Ok(ComplexityProfile {
        samples,
        estimator_id: ESTIMATOR_ID.into(),
        ambient_dim: source.dim(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DimMode {
    LimInf,
    LimSup,
}

/// Tail-window min (liminf) or max (limsup) of `k_r / (n r)`: the density of
/// estimated information per coordinate bit. The tail is the last half of
/// the samples and must hold at least 8 of them.
pub fn effective_dim(profile: &ComplexityProfile, mode: DimMode) -> Result<f64, EstimatorError> {
    effective_dim_with_tail(profile, mode, 0.5)
}

pub fn effective_dim_with_tail(
    profile: &ComplexityProfile,
    mode: DimMode,
    tail_fraction: f64,
) -> Result<f64, EstimatorError> {
    let len = profile.samples.len();
    let tail_len = ((len as f64) * tail_fraction).ceil() as usize;
    if tail_len < 8 {
        return Err(EstimatorError::ProfileTooShort {
            found: tail_len,
            need: 8,
        });
    }
    let tail = &profile.samples[len - tail_len..];
    let n = profile.ambient_dim as f64;
    let ratios = tail.iter().map(|&(r, k)| k / (n * r as f64));
    Ok(match mode {
        DimMode::LimInf => ratios.fold(f64::INFINITY, f64::min),
        DimMode::LimSup => ratios.fold(f64::NEG_INFINITY, f64::max),
    })
}
