//! Cover construction by co-refinement of grid cells and IFS ball images.
//!
//! The attractor is outer-approximated at every depth by balls `f_w(B)` where
//! `B` is the invariant bounding ball. Walking the cell tree, each cell keeps
//! the balls that meet it, refined until their diameter is below the cell
//! side; a cell is occupied iff it meets at least one ball. Children of a
//! piece are `f_w . f_i (B)`, i.e. words extend on the right, which keeps the
//! union of pieces a cover of the attractor at every refinement stage.
//!
//! Ball-vs-cell tests exclude exact tangency (`dist^2 < rad^2 * (1 - 1e-12)`),
//! so grid-aligned attractor boundaries do not bleed into neighboring cells.
//!
//! For IFSs that live on the dyadic grid (identity rotations, one ratio
//! `2^-a`, dyadic translations) cell-relative piece configurations recur
//! exactly, so occupied-cell counts are computed by memoizing configurations
//! and propagating multiplicities instead of enumerating cells. The two
//! routes produce identical counts; a test pins that.

use rayon::prelude::*;

use crate::error::FractalError;
use crate::geometry::Direction;

use super::{IfsSpec, MAX_AMBIENT_DIM};

const TANGENCY_EPS: f64 = 1e-12;
/// Guard for the configuration memo of the dyadic fast path.
const MAX_CONFIGS: usize = 200_000;

type Cell = [i64; MAX_AMBIENT_DIM];

#[derive(Debug, Clone, Copy)]
struct Ball {
    c: [f64; MAX_AMBIENT_DIM],
    rad: f64,
    /// `rad / R`: the contraction applied so far; children sit at
    /// `c + scale * Q_w t_i`.
    scale: f64,
}

#[derive(Debug, Clone, Copy)]
struct RotBall {
    c: [f64; MAX_AMBIENT_DIM],
    rad: f64,
    scale: f64,
    /// Composed orthogonal part `Q_w`, row-major.
    q: [[f64; MAX_AMBIENT_DIM]; MAX_AMBIENT_DIM],
}

trait Piece: Copy + Send {
    fn center(&self) -> &[f64; MAX_AMBIENT_DIM];
    fn rad(&self) -> f64;
    fn child(&self, eng: &Engine, map: usize) -> Self;
}

impl Piece for Ball {
    fn center(&self) -> &[f64; MAX_AMBIENT_DIM] {
        &self.c
    }
    fn rad(&self) -> f64 {
        self.rad
    }
    fn child(&self, eng: &Engine, map: usize) -> Self {
        let m = &eng.maps[map];
        let mut c = self.c;
        for i in 0..eng.n {
            c[i] += self.scale * m.trans[i];
        }
        Ball {
            c,
            rad: self.rad * m.ratio,
            scale: self.scale * m.ratio,
        }
    }
}

impl Piece for RotBall {
    fn center(&self) -> &[f64; MAX_AMBIENT_DIM] {
        &self.c
    }
    fn rad(&self) -> f64 {
        self.rad
    }
    fn child(&self, eng: &Engine, map: usize) -> Self {
        let m = &eng.maps[map];
        let n = eng.n;
        let mut c = self.c;
        for i in 0..n {
            let mut rt = 0.0;
            for j in 0..n {
                rt += self.q[i][j] * m.trans[j];
            }
            c[i] += self.scale * rt;
        }
        let mut q = [[0.0; MAX_AMBIENT_DIM]; MAX_AMBIENT_DIM];
        for i in 0..n {
            for j in 0..n {
                let mut v = 0.0;
                for k in 0..n {
                    v += self.q[i][k] * m.rot[k][j];
                }
                q[i][j] = v;
            }
        }
        RotBall {
            c,
            rad: self.rad * m.ratio,
            scale: self.scale * m.ratio,
            q,
        }
    }
}

struct FlatMap {
    ratio: f64,
    trans: [f64; MAX_AMBIENT_DIM],
    rot: [[f64; MAX_AMBIENT_DIM]; MAX_AMBIENT_DIM],
}

pub(super) struct Engine {
    n: usize,
    maps: Vec<FlatMap>,
    radius: f64,
    identity_rotations: bool,
}

impl Engine {
    pub(super) fn new(ifs: &IfsSpec) -> Result<Self, FractalError> {
        ifs.validate()?;
        let n = ifs.dim();
        if n > MAX_AMBIENT_DIM {
            return Err(FractalError::DimensionTooLarge {
                got: n,
                max: MAX_AMBIENT_DIM,
            });
        }
        let mut identity = true;
        let maps = ifs
            .maps
            .iter()
            .map(|m| {
                let mut trans = [0.0; MAX_AMBIENT_DIM];
                trans[..n].copy_from_slice(&m.translation);
                let mut rot = [[0.0; MAX_AMBIENT_DIM]; MAX_AMBIENT_DIM];
                for i in 0..n {
                    for j in 0..n {
                        rot[i][j] = m.orthogonal[i][j];
                        let want = if i == j { 1.0 } else { 0.0 };
                        if m.orthogonal[i][j] != want {
                            identity = false;
                        }
                    }
                }
                FlatMap {
                    ratio: m.ratio,
                    trans,
                    rot,
                }
            })
            .collect();
        // degenerate IFSs (all translations zero) still get a seed ball
        let radius = ifs.bounding_radius().max(1e-18);
        Ok(Engine {
            n,
            maps,
            radius,
            identity_rotations: identity,
        })
    }

    fn cell_meets(&self, cell: &Cell, depth: u32, c: &[f64; MAX_AMBIENT_DIM], rad: f64) -> bool {
        let side = f64::powi(2.0, -(depth as i32));
        let mut d2 = 0.0;
        for i in 0..self.n {
            let lo = cell[i] as f64 * side;
            let hi = lo + side;
            let v = c[i];
            let d = if v < lo {
                lo - v
            } else if v > hi {
                v - hi
            } else {
                0.0
            };
            d2 += d * d;
        }
        d2 < rad * rad * (1.0 - TANGENCY_EPS)
    }
}

struct Scratch<P> {
    refined: Vec<Vec<(P, u16)>>,
    pass: Vec<Vec<P>>,
    work: Vec<P>,
}

impl<P> Scratch<P> {
    fn new(depth: usize) -> Self {
        Scratch {
            refined: (0..=depth).map(|_| Vec::new()).collect(),
            pass: (0..=depth + 1).map(|_| Vec::new()).collect(),
            work: Vec::new(),
        }
    }
}

/// Per-axis child mask: which of the `2^n` half-cells a ball can touch.
fn child_mask(eng: &Engine, cell: &Cell, depth: u32, c: &[f64; MAX_AMBIENT_DIM], rad: f64) -> u16 {
    let side_next = f64::powi(2.0, -(depth as i32 + 1));
    let mut mask: u16 = 1;
    for i in 0..eng.n {
        let mid = (2 * cell[i] + 1) as f64 * side_next;
        let lo_ok = c[i] - rad < mid;
        let hi_ok = c[i] + rad > mid;
        let mut nm: u16 = 0;
        for ch in 0..(1u16 << i) {
            if mask & (1 << ch) != 0 {
                if lo_ok {
                    nm |= 1 << ch;
                }
                if hi_ok {
                    nm |= 1 << (ch | (1 << i));
                }
            }
        }
        mask = nm;
    }
    mask
}

fn recurse<P: Piece, V: FnMut(u32, &Cell)>(
    eng: &Engine,
    depth: u32,
    cell: &Cell,
    pieces: &[P],
    r_max: u32,
    scratch: &mut Scratch<P>,
    visit: &mut V,
) {
    visit(depth, cell);
    if depth == r_max {
        return;
    }
    let target = f64::powi(2.0, -(depth as i32 + 2));
    let mut refined = std::mem::take(&mut scratch.refined[depth as usize]);
    refined.clear();
    let mut work = std::mem::take(&mut scratch.work);
    work.clear();
    for p in pieces {
        work.push(*p);
        while let Some(b) = work.pop() {
            if !eng.cell_meets(cell, depth, b.center(), b.rad()) {
                continue;
            }
            if b.rad() <= target {
                let mask = child_mask(eng, cell, depth, b.center(), b.rad());
                if mask != 0 {
                    refined.push((b, mask));
                }
            } else {
                for m in 0..eng.maps.len() {
                    work.push(b.child(eng, m));
                }
            }
        }
    }
    scratch.work = work;

    let children = 1u16 << eng.n;
    for ch in 0..children {
        let mut child_cell = *cell;
        for i in 0..eng.n {
            child_cell[i] = 2 * cell[i] + ((ch >> i) & 1) as i64;
        }
        let mut pass = std::mem::take(&mut scratch.pass[depth as usize + 1]);
        pass.clear();
        for (b, mask) in &refined {
            if mask & (1 << ch) != 0 && eng.cell_meets(&child_cell, depth + 1, b.center(), b.rad())
            {
                pass.push(*b);
            }
        }
        if !pass.is_empty() {
            recurse(eng, depth + 1, &child_cell, &pass, r_max, scratch, visit);
        }
        scratch.pass[depth as usize + 1] = pass;
    }
    scratch.refined[depth as usize] = refined;
}

/// Root cells with their entry piece lists (pieces refined to radius <= 1/2).
fn roots<P: Piece>(eng: &Engine, seed: P) -> Vec<(Cell, Vec<P>)> {
    let mut pieces = Vec::new();
    let mut work = vec![seed];
    while let Some(b) = work.pop() {
        if b.rad() <= 0.5 {
            pieces.push(b);
        } else {
            for m in 0..eng.maps.len() {
                work.push(b.child(eng, m));
            }
        }
    }
    let r = eng.radius;
    let lo = (-r).floor() as i64 - 1;
    let hi = r.ceil() as i64 + 1;
    let mut cells = Vec::new();
    let mut idx = [lo; MAX_AMBIENT_DIM];
    'outer: loop {
        let cell: Cell = idx;
        let entry: Vec<P> = pieces
            .iter()
            .copied()
            .filter(|b| eng.cell_meets(&cell, 0, b.center(), b.rad()))
            .collect();
        if !entry.is_empty() {
            cells.push((cell, entry));
        }
        // odometer over the n used axes
        for i in 0..eng.n {
            idx[i] += 1;
            if idx[i] <= hi {
                continue 'outer;
            }
            idx[i] = lo;
        }
        break;
    }
    cells
}

fn root_ball(eng: &Engine) -> Ball {
    Ball {
        c: [0.0; MAX_AMBIENT_DIM],
        rad: eng.radius,
        scale: 1.0,
    }
}

fn root_rotball(eng: &Engine) -> RotBall {
    let mut q = [[0.0; MAX_AMBIENT_DIM]; MAX_AMBIENT_DIM];
    for i in 0..MAX_AMBIENT_DIM {
        q[i][i] = 1.0;
    }
    RotBall {
        c: [0.0; MAX_AMBIENT_DIM],
        rad: eng.radius,
        scale: 1.0,
        q,
    }
}

/// Frontier split for parallel walks: serial prefix down to `d0`, then one
/// task per frontier node.
struct Frontier<P> {
    prefix: Vec<(u32, Cell)>,
    tasks: Vec<(Cell, Vec<P>)>,
    d0: u32,
}

fn build_frontier<P: Piece>(eng: &Engine, seed: P, r_max: u32, d0: u32) -> Frontier<P> {
    let d0 = d0.min(r_max);
    let mut prefix = Vec::new();
    let mut tasks = Vec::new();
    for (cell, pieces) in roots(eng, seed) {
        if d0 == 0 {
            tasks.push((cell, pieces));
        } else {
            recurse_frontier(eng, 0, &cell, &pieces, d0, &mut prefix, &mut tasks);
        }
    }
    Frontier { prefix, tasks, d0 }
}

fn recurse_frontier<P: Piece>(
    eng: &Engine,
    depth: u32,
    cell: &Cell,
    pieces: &[P],
    d0: u32,
    prefix: &mut Vec<(u32, Cell)>,
    tasks: &mut Vec<(Cell, Vec<P>)>,
) {
    prefix.push((depth, *cell));
    let target = f64::powi(2.0, -(depth as i32 + 2));
    let mut refined = Vec::new();
    let mut work: Vec<P> = Vec::new();
    for p in pieces {
        work.push(*p);
        while let Some(b) = work.pop() {
            if !eng.cell_meets(cell, depth, b.center(), b.rad()) {
                continue;
            }
            if b.rad() <= target {
                refined.push(b);
            } else {
                for m in 0..eng.maps.len() {
                    work.push(b.child(eng, m));
                }
            }
        }
    }
    let children = 1u16 << eng.n;
    for ch in 0..children {
        let mut child_cell = *cell;
        for i in 0..eng.n {
            child_cell[i] = 2 * cell[i] + ((ch >> i) & 1) as i64;
        }
        let pass: Vec<P> = refined
            .iter()
            .copied()
            .filter(|b| eng.cell_meets(&child_cell, depth + 1, b.center(), b.rad()))
            .collect();
        if pass.is_empty() {
            continue;
        }
        if depth + 1 == d0 {
            tasks.push((child_cell, pass));
        } else {
            recurse_frontier(eng, depth + 1, &child_cell, &pass, d0, prefix, tasks);
        }
    }
}

fn walk_with<P: Piece, A, FInit, FVisit, FMerge>(
    eng: &Engine,
    seed: P,
    r_max: u32,
    init: FInit,
    visit: FVisit,
    merge: FMerge,
) -> A
where
    A: Send,
    FInit: Fn() -> A + Sync,
    FVisit: Fn(&mut A, u32, &Cell) + Sync,
    FMerge: Fn(A, A) -> A + Sync,
{
    let d0 = 5u32.min(r_max);
    let frontier = build_frontier(eng, seed, r_max, d0);
    let mut base = init();
    for (depth, cell) in &frontier.prefix {
        visit(&mut base, *depth, cell);
    }
    let task_result = frontier
        .tasks
        .into_par_iter()
        .fold(&init, |mut acc, (cell, pieces)| {
            let mut scratch = Scratch::new(r_max as usize + 1);
            recurse(
                eng,
                frontier.d0,
                &cell,
                &pieces,
                r_max,
                &mut scratch,
                &mut |d, c| visit(&mut acc, d, c),
            );
            acc
        })
        .reduce(&init, &merge);
    merge(base, task_result)
}

/// Occupied-cell counts at every depth `0..=r_max` by direct enumeration.
pub(super) fn count_series_generic(eng: &Engine, r_max: u32) -> Vec<u64> {
    let init = || vec![0u64; r_max as usize + 1];
    let visit = |acc: &mut Vec<u64>, d: u32, _: &Cell| acc[d as usize] += 1;
    let merge = |mut a: Vec<u64>, b: Vec<u64>| {
        for (x, y) in a.iter_mut().zip(b) {
            *x += y;
        }
        a
    };
    if eng.identity_rotations {
        walk_with(eng, root_ball(eng), r_max, init, visit, merge)
    } else {
        walk_with(eng, root_rotball(eng), r_max, init, visit, merge)
    }
}

/// All occupied cells at depth exactly `r`.
pub(super) fn collect_cells(eng: &Engine, r: u32) -> Vec<Vec<i64>> {
    let n = eng.n;
    let init = Vec::new;
    let visit = move |acc: &mut Vec<Vec<i64>>, d: u32, c: &Cell| {
        if d == r {
            acc.push(c[..n].to_vec());
        }
    };
    let merge = |mut a: Vec<Vec<i64>>, b: Vec<Vec<i64>>| {
        a.extend(b);
        a
    };
    if eng.identity_rotations {
        walk_with(eng, root_ball(eng), r, init, visit, merge)
    } else {
        walk_with(eng, root_rotball(eng), r, init, visit, merge)
    }
}

/// 1-D grid indices covered by the projection of `cell` (at `depth`) onto
/// `e`: the interval spanned by `e . x` over the half-open cell, rasterized
/// at the same precision. The supremum endpoint is never attained inside a
/// half-open box, so an exactly grid-aligned upper edge does not bleed into
/// the next 1-D cell.
pub fn project_cell_range(cell: &[i64], depth: u32, e: &[f64]) -> (i64, i64) {
    // side * 2^depth = 1, so index space needs no rescaling:
    // proj * 2^depth = sum e_i cell_i + (sum e_i)/2 +- (sum |e_i|)/2
    let mut dot_cells = 0.0;
    let mut half_sum = 0.0;
    let mut abs_half = 0.0;
    for (i, &ei) in e.iter().enumerate() {
        dot_cells += ei * cell[i] as f64;
        half_sum += 0.5 * ei;
        abs_half += 0.5 * ei.abs();
    }
    let _ = depth;
    let lo = (dot_cells + half_sum - abs_half).floor() as i64;
    let hi = (((dot_cells + half_sum + abs_half).ceil() as i64) - 1).max(lo);
    (lo, hi)
}

/// Dense bit rows for batched projection marking.
struct BitRow {
    base: i64,
    words: Vec<u64>,
}

impl BitRow {
    fn new(base: i64, size: usize) -> Self {
        BitRow {
            base,
            words: vec![0; size.div_ceil(64)],
        }
    }

    #[inline]
    fn set_range(&mut self, lo: i64, hi: i64) {
        let cap = (self.words.len() * 64) as i64;
        let a = (lo - self.base).clamp(0, cap - 1);
        let b = (hi - self.base).clamp(0, cap - 1);
        for i in a..=b {
            self.words[(i >> 6) as usize] |= 1u64 << (i & 63);
        }
    }

    fn or_with(&mut self, other: &BitRow) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    fn count(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }
}

struct ProjAccum {
    rows: Vec<BitRow>, // indexed dir * n_levels + level_offset
}

fn accum_new(radius: f64, dirs: usize, r_lo: u32, r_hi: u32) -> ProjAccum {
    let mut rows = Vec::with_capacity(dirs * (r_hi - r_lo + 1) as usize);
    for _ in 0..dirs {
        for k in r_lo..=r_hi {
            let scale = f64::powi(2.0, k as i32);
            let base = ((-radius - 1.0) * scale).floor() as i64 - 2;
            let top = ((radius + 1.0) * scale).ceil() as i64 + 2;
            rows.push(BitRow::new(base, (top - base + 1) as usize));
        }
    }
    ProjAccum { rows }
}

fn accum_bytes(radius: f64, r_lo: u32, r_hi: u32) -> usize {
    (r_lo..=r_hi)
        .map(|k| {
            let scale = f64::powi(2.0, k as i32);
            let size = (2.0 * (radius + 1.0) * scale) as usize + 8;
            size / 8 + 16
        })
        .sum()
}

/// Per-direction occupied counts of the projected covers at every level in
/// `r_lo..=r_hi`, computed in one walk per direction chunk.
pub(super) fn project_count_series_batch(
    eng: &Engine,
    dirs: &[Direction],
    r_lo: u32,
    r_hi: u32,
) -> Vec<Vec<u64>> {
    assert!(r_lo <= r_hi);
    let n_levels = (r_hi - r_lo + 1) as usize;
    let radius = eng.radius;
    let per_dir = accum_bytes(radius, r_lo, r_hi);
    let budget = 48 << 20;
    let chunk = (budget / per_dir.max(1)).clamp(1, dirs.len().max(1));

    let mut out: Vec<Vec<u64>> = Vec::with_capacity(dirs.len());
    for chunk_dirs in dirs.chunks(chunk) {
        let comps: Vec<&[f64]> = chunk_dirs.iter().map(|d| d.components()).collect();
        let nd = comps.len();
        let init = || accum_new(radius, nd, r_lo, r_hi);
        let visit = |acc: &mut ProjAccum, depth: u32, cell: &Cell| {
            if depth < r_lo || depth > r_hi {
                return;
            }
            let lev = (depth - r_lo) as usize;
            for (d, e) in comps.iter().enumerate() {
                let (lo, hi) = project_cell_range(&cell[..e.len()], depth, e);
                acc.rows[d * n_levels + lev].set_range(lo, hi);
            }
        };
        let merge = |mut a: ProjAccum, b: ProjAccum| {
            for (x, y) in a.rows.iter_mut().zip(&b.rows) {
                x.or_with(y);
            }
            a
        };
        let acc = if eng.identity_rotations {
            walk_with(eng, root_ball(eng), r_hi, init, visit, merge)
        } else {
            walk_with(eng, root_rotball(eng), r_hi, init, visit, merge)
        };
        for d in 0..nd {
            out.push(
                (0..n_levels)
                    .map(|lev| acc.rows[d * n_levels + lev].count())
                    .collect(),
            );
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Dyadic fast path: memoized cell-relative configurations.
// ---------------------------------------------------------------------------

#[derive(Clone, Copy)]
struct RelBall {
    c: [f64; MAX_AMBIENT_DIM],
    /// `scale = rad / R`, an exact power of two on this path.
    scale: f64,
}

pub(super) struct TransferEngine<'a> {
    eng: &'a Engine,
    ratio: f64,
}

impl<'a> TransferEngine<'a> {
    /// Eligibility: identity rotations, one common ratio `2^-a`, and
    /// translations exactly representable on the dyadic grid. Under those the
    /// relative-coordinate arithmetic below is exact in f64.
    pub(super) fn try_new(eng: &'a Engine) -> Option<Self> {
        if !eng.identity_rotations {
            return None;
        }
        let ratio = eng.maps[0].ratio;
        let dyadic = (1..=20).any(|a| ratio == f64::powi(2.0, -a));
        if !dyadic {
            return None;
        }
        for m in &eng.maps {
            if m.ratio != ratio {
                return None;
            }
            for i in 0..eng.n {
                let scaled = m.trans[i] * f64::powi(2.0, 20);
                if scaled.fract() != 0.0 || scaled.abs() > 1e15 {
                    return None;
                }
            }
        }
        Some(TransferEngine { eng, ratio })
    }

    fn rel_key(&self, rad_rel: f64, pieces: &[RelBall]) -> Vec<u64> {
        let n = self.eng.n;
        let mut key = Vec::with_capacity(1 + pieces.len() * n);
        key.push(rad_rel.to_bits());
        let mut rows: Vec<[u64; MAX_AMBIENT_DIM]> = pieces
            .iter()
            .map(|b| {
                let mut r = [0u64; MAX_AMBIENT_DIM];
                for i in 0..n {
                    r[i] = b.c[i].to_bits();
                }
                r
            })
            .collect();
        rows.sort_unstable();
        rows.dedup();
        for r in rows {
            key.extend_from_slice(&r[..n]);
        }
        key
    }

    fn meets_unit_cell(&self, b: &RelBall, rad_rel: f64) -> bool {
        let mut d2 = 0.0;
        for i in 0..self.eng.n {
            let v = b.c[i];
            let d = if v < 0.0 {
                -v
            } else if v > 1.0 {
                v - 1.0
            } else {
                0.0
            };
            d2 += d * d;
        }
        d2 < rad_rel * rad_rel * (1.0 - TANGENCY_EPS)
    }

    /// Counts per depth `0..=r_max`; `None` if the configuration memo blows
    /// its guard (caller falls back to enumeration).
    pub(super) fn count_series(&self, r_max: u32) -> Option<Vec<u64>> {
        use std::collections::HashMap;

        let eng = self.eng;
        let n = eng.n;

        // Seed: root cells in absolute coordinates, pieces made cell-relative.
        let seeds = roots(eng, root_ball(eng));
        let mut memo: HashMap<Vec<u64>, usize> = HashMap::new();
        let mut states: Vec<(f64, Vec<RelBall>)> = Vec::new();
        let mut transitions: Vec<Option<Vec<usize>>> = Vec::new();
        let mut counts: HashMap<usize, u64> = HashMap::new();

        let intern = |rad_rel: f64,
                      pieces: Vec<RelBall>,
                      memo: &mut HashMap<Vec<u64>, usize>,
                      states: &mut Vec<(f64, Vec<RelBall>)>,
                      transitions: &mut Vec<Option<Vec<usize>>>|
         -> usize {
            let key = self.rel_key(rad_rel, &pieces);
            *memo.entry(key).or_insert_with(|| {
                states.push((rad_rel, pieces));
                transitions.push(None);
                states.len() - 1
            })
        };

        for (cell, pieces) in seeds {
            let rad_rel = pieces[0].rad; // depth 0: relative radius = radius
            let rel: Vec<RelBall> = pieces
                .iter()
                .map(|b| {
                    let mut c = [0.0; MAX_AMBIENT_DIM];
                    for i in 0..n {
                        c[i] = b.c[i] - cell[i] as f64;
                    }
                    RelBall { c, scale: b.scale }
                })
                .collect();
            let id = intern(rad_rel, rel, &mut memo, &mut states, &mut transitions);
            *counts.entry(id).or_insert(0) += 1;
        }

        let mut totals = vec![0u64; r_max as usize + 1];
        totals[0] = counts.values().sum();

        let children = 1usize << n;
        for depth in 0..r_max {
            let mut next: HashMap<usize, u64> = HashMap::new();
            let ids: Vec<usize> = counts.keys().copied().collect();
            for id in ids {
                if transitions[id].is_none() {
                    // refine to radius <= 1/4 in relative units, then split
                    let (rad0, pieces0) = states[id].clone();
                    let mut rad_rel = rad0;
                    let mut cur = pieces0;
                    while rad_rel > 0.25 {
                        let mut nextp = Vec::with_capacity(cur.len() * eng.maps.len());
                        let new_rad = rad_rel * self.ratio;
                        for b in &cur {
                            for m in &eng.maps {
                                let mut c = b.c;
                                for i in 0..n {
                                    c[i] += b.scale * m.trans[i];
                                }
                                let nb = RelBall {
                                    c,
                                    scale: b.scale * self.ratio,
                                };
                                if self.unit_cell_reachable(&nb, new_rad) {
                                    nextp.push(nb);
                                }
                            }
                        }
                        cur = nextp;
                        rad_rel = new_rad;
                    }
                    let mut slots = vec![usize::MAX; children];
                    for ch in 0..children {
                        let mut pass = Vec::new();
                        for b in &cur {
                            let mut c = [0.0; MAX_AMBIENT_DIM];
                            for i in 0..n {
                                c[i] = 2.0 * b.c[i] - ((ch >> i) & 1) as f64;
                            }
                            let nb = RelBall {
                                c,
                                scale: 2.0 * b.scale,
                            };
                            if self.meets_unit_cell(&nb, 2.0 * rad_rel) {
                                pass.push(nb);
                            }
                        }
                        if !pass.is_empty() {
                            slots[ch] = intern(
                                2.0 * rad_rel,
                                pass,
                                &mut memo,
                                &mut states,
                                &mut transitions,
                            );
                        }
                    }
                    if states.len() > MAX_CONFIGS {
                        return None;
                    }
                    transitions[id] = Some(slots);
                }
                let cnt = counts[&id];
                for &cid in transitions[id].as_ref().unwrap() {
                    if cid != usize::MAX {
                        *next.entry(cid).or_insert(0) += cnt;
                    }
                }
            }
            counts = next;
            totals[depth as usize + 1] = counts.values().sum();
        }
        Some(totals)
    }

    /// Loose pruning during refinement: keep a piece if its ball could still
    /// reach the unit cell (the exact per-cell test runs at distribution).
    fn unit_cell_reachable(&self, b: &RelBall, rad_rel: f64) -> bool {
        let mut d2 = 0.0;
        for i in 0..self.eng.n {
            let v = b.c[i];
            let d = if v < 0.0 {
                -v
            } else if v > 1.0 {
                v - 1.0
            } else {
                0.0
            };
            d2 += d * d;
        }
        d2 < rad_rel * rad_rel * (1.0 - TANGENCY_EPS)
    }
}

/// Counts at every depth, taking the memoized route when the IFS lives on
/// the dyadic grid.
pub(super) fn count_series_engine(eng: &Engine, r_max: u32) -> Vec<u64> {
    if let Some(tr) = TransferEngine::try_new(eng) {
        if let Some(c) = tr.count_series(r_max) {
            return c;
        }
    }
    count_series_generic(eng, r_max)
}
