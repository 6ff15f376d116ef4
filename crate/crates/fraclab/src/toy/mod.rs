//! A finite prefix-free decoder over bounded-length bit strings.
//!
//! Exhaustive enumeration of every program up to the length bound makes
//! shortest-program length, precision-r complexity, conditional and
//! relativized variants exactly computable, so the projection lemmas can be
//! checked literally at micro scale.
//!
//! Program format of the reference machine (all parts self-delimiting, so the
//! halting set is prefix-free):
//!
//! ```text
//! uncond   := 0 point | 1 swap:1 uncond cond      (pair composition)
//! cond     := 0 uncond | 1 point                  (point = delta vs oracle)
//! point    := gamma(n) gamma(r+1) mantissa[n*r]
//! ```
//!
//! A `point` places each coordinate at `m * 2^(1-r)` with `m` read as an
//! r-bit two's-complement integer, so plainly coded coordinates live in the
//! window `[-1, 1)`. A pair composition decodes its second part with the
//! first part's output as oracle, which is what makes joint descriptions
//! cheaper than two independent ones. With an oracle side input present, one
//! leading bit selects `cond`; without one, programs start at `uncond`.

mod table;
mod verify;

pub mod constants;

pub use table::{ComplexityTable, TableEntry, Universe};
pub use verify::{
    clamp_oracle, recover_point, verify_point_lemma, verify_projection_bound,
    verify_symmetry_of_information, ClampedComplexity, PointLemmaReport, ProjectionBoundReport,
    SymmetryReport,
};

use crate::error::ToyError;
use crate::geometry::DyadicPoint;
use arrayvec::ArrayVec;

/// Hard ceiling on program length: the enumeration budget is `2^(L+1)` decodes.
pub const L_MAX_HARD: u32 = 24;
/// Decoded points are capped at this many coordinates.
pub const MAX_DIM: usize = 8;
/// Largest precision header a plain point may carry.
const MAX_POINT_R: u32 = 30;

/// A bit string of length <= 32, first bit most significant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Code {
    len: u8,
    bits: u32,
}

impl Code {
    pub const EMPTY: Code = Code { len: 0, bits: 0 };

    pub fn new(len: u8, bits: u32) -> Self {
        debug_assert!(len <= 32);
        let mask = if len == 32 {
            u32::MAX
        } else {
            (1u32 << len) - 1
        };
        Code {
            len,
            bits: bits & mask,
        }
    }

    pub fn len(&self) -> u8 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn bit(&self, i: u8) -> bool {
        debug_assert!(i < self.len);
        (self.bits >> (self.len - 1 - i)) & 1 == 1
    }

    pub fn push(&mut self, bit: bool) {
        debug_assert!(self.len < 32);
        self.bits = (self.bits << 1) | bit as u32;
        self.len += 1;
    }

    pub fn append(&mut self, other: Code) {
        debug_assert!(self.len + other.len <= 32);
        self.bits = (self.bits << other.len) | other.bits;
        self.len += other.len;
    }

    /// True if `self` is a proper prefix of `other`.
    pub fn is_proper_prefix_of(&self, other: &Code) -> bool {
        self.len < other.len && (other.bits >> (other.len - self.len)) == self.bits
    }

    pub fn from_bit_str(s: &str) -> Self {
        let mut c = Code::EMPTY;
        for ch in s.chars() {
            match ch {
                '0' => c.push(false),
                '1' => c.push(true),
                _ => panic!("bit string may only contain 0 and 1"),
            }
        }
        c
    }
}

impl std::fmt::Display for Code {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", if self.bit(i) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

/// Elias gamma code for `k >= 1`.
pub fn gamma(k: u32) -> Code {
    assert!(k >= 1);
    let n = 31 - k.leading_zeros(); // floor(log2 k)
    let mut c = Code::EMPTY;
    for _ in 0..n {
        c.push(false);
    }
    let width = n + 1;
    c.append(Code::new(width as u8, k));
    c
}

struct Reader {
    code: Code,
    pos: u8,
}

impl Reader {
    fn new(code: Code) -> Self {
        Reader { code, pos: 0 }
    }

    fn take(&mut self) -> Option<bool> {
        if self.pos >= self.code.len() {
            return None;
        }
        let b = self.code.bit(self.pos);
        self.pos += 1;
        Some(b)
    }

    fn take_uint(&mut self, width: u8) -> Option<u32> {
        let mut v = 0u32;
        for _ in 0..width {
            v = (v << 1) | self.take()? as u32;
        }
        Some(v)
    }

    fn take_gamma(&mut self) -> Option<u32> {
        let mut zeros = 0u8;
        loop {
            if self.take()? {
                break;
            }
            zeros += 1;
            if zeros > 31 {
                return None;
            }
        }
        let rest = self.take_uint(zeros)?;
        Some((1u32 << zeros) | rest)
    }

    fn exhausted(&self) -> bool {
        self.pos == self.code.len()
    }
}

type Coords = ArrayVec<i64, MAX_DIM>;

fn read_point(r: &mut Reader) -> Option<(Coords, u32)> {
    let n = r.take_gamma()? as usize;
    if n == 0 || n > MAX_DIM {
        return None;
    }
    let hdr = r.take_gamma()?;
    let prec = hdr - 1;
    if prec > MAX_POINT_R {
        return None;
    }
    let mut m = Coords::new();
    if prec == 0 {
        for _ in 0..n {
            m.push(0);
        }
        return Some((m, 0));
    }
    for _ in 0..n {
        let u = r.take_uint(prec as u8)? as i64;
        let half = 1i64 << (prec - 1);
        let v = if u >= half { u - (1i64 << prec) } else { u };
        m.push(v);
    }
    // coordinate value is m * 2^(1-r): grid precision r-1
    Some((m, prec - 1))
}

fn to_point(m: Coords, prec: u32) -> DyadicPoint {
    DyadicPoint::new(m.to_vec(), prec)
}

fn decode_uncond(r: &mut Reader, depth: u32) -> Option<DyadicPoint> {
    if depth > 32 {
        return None;
    }
    if r.take()? {
        // pair composition
        let swap = r.take()?;
        let a = decode_uncond(r, depth + 1)?;
        let b = decode_cond(r, Some(&a), depth + 1)?;
        if a.dim() + b.dim() > MAX_DIM {
            return None;
        }
        Some(if swap { b.concat(&a) } else { a.concat(&b) })
    } else {
        let (m, prec) = read_point(r)?;
        Some(to_point(m, prec))
    }
}

fn decode_cond(r: &mut Reader, ctx: Option<&DyadicPoint>, depth: u32) -> Option<DyadicPoint> {
    if depth > 32 {
        return None;
    }
    if r.take()? {
        // delta against the oracle point
        let ctx = ctx?;
        let (m, prec) = read_point(r)?;
        if m.len() != ctx.dim() {
            return None;
        }
        ctx.add(&to_point(m, prec))
    } else {
        decode_uncond(r, depth + 1)
    }
}

/// Parses an oracle side input as a bare `point` record (no mode bits),
/// requiring full consumption. This is the canonical encoding produced by
/// [`encode_plain`].
pub fn parse_oracle(code: &Code) -> Option<DyadicPoint> {
    let mut r = Reader::new(*code);
    let (m, prec) = read_point(&mut r)?;
    if !r.exhausted() {
        return None;
    }
    Some(to_point(m, prec))
}

/// Canonical bare-point encoding of a dyadic point, if all coordinates fit
/// the `[-1, 1)` window. Inverse of [`parse_oracle`].
pub fn encode_plain(p: &DyadicPoint) -> Option<Code> {
    let g = p.precision();
    let hdr_r = g + 1;
    if hdr_r > MAX_POINT_R || p.dim() > MAX_DIM {
        return None;
    }
    let half = 1i64 << (hdr_r - 1);
    let mut c = Code::EMPTY;
    c.append(gamma(p.dim() as u32));
    c.append(gamma(hdr_r + 1));
    if c.len() as u32 + p.dim() as u32 * hdr_r > 32 {
        return None;
    }
    for &m in p.mantissas() {
        if m < -half || m >= half {
            return None;
        }
        let u = if m < 0 {
            (m + (1i64 << hdr_r)) as u32
        } else {
            m as u32
        };
        c.append(Code::new(hdr_r as u8, u));
    }
    Some(c)
}

/// A total decoder from (program, optional oracle side input) to a dyadic
/// point or bottom.
pub trait Decoder: Send + Sync {
    fn l_max(&self) -> u32;
    fn decode(&self, program: Code, oracle: Option<&Code>) -> Option<DyadicPoint>;
}

/// The shipped reference machine.
#[derive(Debug, Clone)]
pub struct ReferenceMachine {
    l_max: u32,
}

impl ReferenceMachine {
    pub fn new(l_max: u32) -> Result<Self, ToyError> {
        if l_max > L_MAX_HARD {
            return Err(ToyError::BudgetExceeded {
                requested: l_max,
                max: L_MAX_HARD,
            });
        }
        Ok(ReferenceMachine { l_max })
    }
}

impl Decoder for ReferenceMachine {
    fn l_max(&self) -> u32 {
        self.l_max
    }

    fn decode(&self, program: Code, oracle: Option<&Code>) -> Option<DyadicPoint> {
        if program.len() as u32 > self.l_max {
            return None;
        }
        let mut r = Reader::new(program);
        let out = match oracle {
            Some(bits) => {
                let ctx = parse_oracle(bits);
                decode_cond(&mut r, ctx.as_ref(), 0)?
            }
            None => decode_uncond(&mut r, 0)?,
        };
        // trailing bits would break prefix-freeness
        if !r.exhausted() {
            return None;
        }
        Some(out)
    }
}

/// One planted program of a rigged universe.
#[derive(Debug, Clone)]
pub struct Plant {
    /// Program bits after the leading 0 that selects the planted zone.
    pub code: Code,
    /// When set, the plant only decodes under exactly this oracle side input.
    pub requires_oracle: Option<Code>,
    pub point: DyadicPoint,
}

/// Reference machine with a reserved prefix zone of hand-planted programs.
///
/// Programs starting with 1 delegate to the reference decoder (shifting its
/// costs by one bit); programs starting with 0 decode iff the remainder
/// exactly matches a plant. Used to build counterexample universes: a cheap
/// program for a chosen point, or an oracle that reveals a point.
pub struct PlantedDecoder {
    base: ReferenceMachine,
    plants: Vec<Plant>,
}

impl PlantedDecoder {
    pub fn new(base: ReferenceMachine, plants: Vec<Plant>) -> Result<Self, ToyError> {
        for (i, a) in plants.iter().enumerate() {
            if a.code.len() as u32 + 1 > base.l_max() {
                return Err(ToyError::PlantClash(format!(
                    "plant {i} is longer than l_max"
                )));
            }
            for b in plants.iter().skip(i + 1) {
                if a.code == b.code
                    || a.code.is_proper_prefix_of(&b.code)
                    || b.code.is_proper_prefix_of(&a.code)
                {
                    return Err(ToyError::PlantClash(format!(
                        "{} and {} overlap",
                        a.code, b.code
                    )));
                }
            }
        }
        Ok(PlantedDecoder { base, plants })
    }
}

impl Decoder for PlantedDecoder {
    fn l_max(&self) -> u32 {
        self.base.l_max()
    }

    fn decode(&self, program: Code, oracle: Option<&Code>) -> Option<DyadicPoint> {
        if program.is_empty() || program.len() as u32 > self.l_max() {
            return None;
        }
        let rest = Code::new(program.len() - 1, program.bits);
        if program.bit(0) {
            self.base.decode(rest, oracle)
        } else {
            for p in &self.plants {
                if p.code == rest {
                    let active = match (&p.requires_oracle, oracle) {
                        (None, _) => true,
                        (Some(req), Some(got)) => req == got,
                        (Some(_), None) => false,
                    };
                    return if active { Some(p.point.clone()) } else { None };
                }
            }
            None
        }
    }
}
