//! Exhaustive complexity tables: shortest program per producible point.

use std::collections::HashMap;
use std::io::Write;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use crate::error::ToyError;
use crate::geometry::DyadicPoint;

use super::{encode_plain, Code, Decoder, L_MAX_HARD};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableEntry {
    /// Exact shortest program length, in bits.
    pub k: u32,
    /// Lexicographically first witness among the shortest programs.
    pub witness: Code,
}

/// Map from producible point to its exact K value under one decoder and one
/// oracle side input. Built by shortest-first enumeration of all programs of
/// length at most `l_max` (lexicographic within a length), so it is
/// deterministic and independent of enumeration parallelism.
pub struct ComplexityTable {
    entries: HashMap<DyadicPoint, TableEntry>,
    halting: Vec<Code>,
    l_max: u32,
}

impl ComplexityTable {
    /// Enumerates every program of length `<= decoder.l_max()`.
    pub fn build(decoder: &dyn Decoder, oracle: Option<&Code>) -> Result<Self, ToyError> {
        let l_max = decoder.l_max();
        if l_max > L_MAX_HARD {
            return Err(ToyError::BudgetExceeded {
                requested: l_max,
                max: L_MAX_HARD,
            });
        }
        // Strata are scanned in parallel and merged shortest-first, which
        // keeps the result identical to a sequential scan.
        let strata: Vec<(u32, HashMap<DyadicPoint, TableEntry>, Vec<Code>)> = (0..=l_max)
            .into_par_iter()
            .map(|len| {
                let mut local: HashMap<DyadicPoint, TableEntry> = HashMap::new();
                let mut halting = Vec::new();
                let words: u64 = 1u64 << len;
                for w in 0..words {
                    let code = Code::new(len as u8, w as u32);
                    if let Some(p) = decoder.decode(code, oracle) {
                        halting.push(code);
                        local.entry(p).or_insert(TableEntry {
                            k: len,
                            witness: code,
                        });
                    }
                }
                (len, local, halting)
            })
            .collect();

        let mut entries: HashMap<DyadicPoint, TableEntry> = HashMap::new();
        let mut halting = Vec::new();
        let mut ordered = strata;
        ordered.sort_by_key(|(len, _, _)| *len);
        for (_, local, h) in ordered {
            halting.extend(h);
            for (p, e) in local {
                entries.entry(p).or_insert(e);
            }
        }
        Ok(ComplexityTable {
            entries,
            halting,
            l_max,
        })
    }

    pub fn l_max(&self) -> u32 {
        self.l_max
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn k(&self, p: &DyadicPoint) -> Option<u32> {
        self.entries.get(p).map(|e| e.k)
    }

    pub fn entry(&self, p: &DyadicPoint) -> Option<&TableEntry> {
        self.entries.get(p)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&DyadicPoint, &TableEntry)> {
        self.entries.iter()
    }

    pub fn halting_programs(&self) -> &[Code] {
        &self.halting
    }

    /// `K_r(x)`: minimum K over producible points in the open ball
    /// `B_{2^-r}(x)`; `None` when the universe cannot approximate `x` at this
    /// precision. Also returns the witnessing point.
    pub fn k_r_with_point(&self, x: &[f64], r: u32) -> Option<(u32, &DyadicPoint)> {
        let rad2 = f64::powi(2.0, -(r as i32)).powi(2);
        let mut best: Option<(u32, &DyadicPoint)> = None;
        for (p, e) in &self.entries {
            if p.dim() != x.len() {
                continue;
            }
            let c = p.coords();
            let d2: f64 = c.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
            if d2 < rad2 {
                let better = match best {
                    None => true,
                    Some((bk, bp)) => e.k < bk || (e.k == bk && p < bp),
                };
                if better {
                    best = Some((e.k, p));
                }
            }
        }
        best
    }

    pub fn k_r(&self, x: &[f64], r: u32) -> Option<u32> {
        self.k_r_with_point(x, r).map(|(k, _)| k)
    }

    /// Exact Kraft sum over all halting programs, as a fraction
    /// `numerator / 2^l_max`.
    pub fn kraft_numerator(&self) -> u128 {
        self.halting
            .iter()
            .map(|c| 1u128 << (self.l_max - c.len() as u32))
            .sum()
    }

    pub fn kraft_sum(&self) -> f64 {
        self.kraft_numerator() as f64 / f64::powi(2.0, self.l_max as i32)
    }

    /// Exact check `sum 2^-l(pi) <= 1` over halting programs.
    pub fn kraft_holds(&self) -> bool {
        self.kraft_numerator() <= 1u128 << self.l_max
    }

    /// Number of halting programs that are proper prefixes of other halting
    /// programs. Zero iff the decoder is prefix-free on this universe.
    pub fn prefix_violations(&self) -> usize {
        let set: std::collections::HashSet<Code> = self.halting.iter().copied().collect();
        let mut bad = 0;
        for c in &self.halting {
            for plen in 0..c.len() {
                let prefix = Code::new(plen, c.bits() >> (c.len() - plen));
                if set.contains(&prefix) {
                    bad += 1;
                }
            }
        }
        bad
    }

    /// CSV export: `program_bits,length,n,r,m_0..m_{n-1}`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "program_bits,length,n,r,mantissas")?;
        let mut rows: Vec<(&DyadicPoint, &TableEntry)> = self.entries.iter().collect();
        rows.sort_by(|a, b| (a.1.k, a.1.witness, a.0).cmp(&(b.1.k, b.1.witness, b.0)));
        for (p, e) in rows {
            let ms: Vec<String> = p.mantissas().iter().map(|m| m.to_string()).collect();
            writeln!(
                w,
                "{},{},{},{},{}",
                e.witness,
                e.k,
                p.dim(),
                p.precision(),
                ms.join(";")
            )?;
        }
        Ok(())
    }
}

/// A decoder together with its exact unconditional table and a cache of
/// conditional tables (one per oracle side input).
pub struct Universe {
    decoder: Arc<dyn Decoder>,
    base: ComplexityTable,
    conditional: Mutex<HashMap<Code, Arc<ComplexityTable>>>,
}

impl Universe {
    pub fn new(decoder: Arc<dyn Decoder>) -> Result<Self, ToyError> {
        let base = ComplexityTable::build(decoder.as_ref(), None)?;
        Ok(Universe {
            decoder,
            base,
            conditional: Mutex::new(HashMap::new()),
        })
    }

    pub fn reference(l_max: u32) -> Result<Self, ToyError> {
        Universe::new(Arc::new(super::ReferenceMachine::new(l_max)?))
    }

    pub fn l_max(&self) -> u32 {
        self.decoder.l_max()
    }

    pub fn decoder(&self) -> &dyn Decoder {
        self.decoder.as_ref()
    }

    pub fn base(&self) -> &ComplexityTable {
        &self.base
    }

    /// Table relative to an arbitrary oracle side input, cached.
    pub fn with_oracle(&self, oracle: &Code) -> Arc<ComplexityTable> {
        if let Some(t) = self.conditional.lock().unwrap().get(oracle) {
            return t.clone();
        }
        let t = Arc::new(
            ComplexityTable::build(self.decoder.as_ref(), Some(oracle))
                .expect("l_max already validated"),
        );
        self.conditional
            .lock()
            .unwrap()
            .entry(*oracle)
            .or_insert(t)
            .clone()
    }

    /// Table relative to a producible point, via its canonical encoding.
    /// `None` when the point has no canonical encoding (coordinates outside
    /// the plain window).
    pub fn given_point(&self, q: &DyadicPoint) -> Option<Arc<ComplexityTable>> {
        encode_plain(q).map(|c| self.with_oracle(&c))
    }

    pub fn k(&self, p: &DyadicPoint) -> Option<u32> {
        self.base.k(p)
    }

    pub fn k_r(&self, x: &[f64], r: u32) -> Option<u32> {
        self.base.k_r(x, r)
    }

    /// `K_r` of a real number (1-dimensional point).
    pub fn k_r_value(&self, q: f64, r: u32) -> Option<u32> {
        self.base.k_r(&[q], r)
    }

    /// Producible points of a given dimension within the open ball
    /// `B_{2^-s}(y)` that admit a canonical oracle encoding.
    fn ball_points(&self, y: &[f64], s: u32) -> Vec<&DyadicPoint> {
        let rad2 = f64::powi(2.0, -(s as i32)).powi(2);
        let mut out: Vec<&DyadicPoint> = self
            .base
            .iter()
            .filter(|(p, _)| p.dim() == y.len())
            .filter(|(p, _)| {
                let c = p.coords();
                let d2: f64 = c.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
                d2 < rad2
            })
            .map(|(p, _)| p)
            .collect();
        out.sort();
        out
    }

    /// `K_{r,s}(x | y)`: max over producible `q` near `y` of the min over
    /// producible `p` near `x` of the shortest program for `p` given `q` as
    /// oracle side input. `None` when either ball is empty.
    pub fn conditional_k_r_s(&self, x: &[f64], r: u32, y: &[f64], s: u32) -> Option<u32> {
        let qs = self.ball_points(y, s);
        let qs: Vec<&DyadicPoint> = qs
            .into_iter()
            .filter(|q| encode_plain(q).is_some())
            .collect();
        if qs.is_empty() {
            return None;
        }
        let mut worst: u32 = 0;
        for q in qs {
            let table = self.given_point(q).expect("encodability checked");
            let best = table.k_r(x, r)?;
            worst = worst.max(best);
        }
        Some(worst)
    }

    /// `K_r(x | y)` at equal precisions.
    pub fn conditional_k_r(&self, x: &[f64], r: u32, y: &[f64]) -> Option<u32> {
        self.conditional_k_r_s(x, r, y, r)
    }

    /// `K_r((x, y))`: complexity of the concatenated point.
    pub fn joint_k_r(&self, x: &[f64], y: &[f64], r: u32) -> Option<u32> {
        let mut v = x.to_vec();
        v.extend_from_slice(y);
        self.base.k_r(&v, r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toy::{Plant, PlantedDecoder, ReferenceMachine};

    fn small_universe() -> Universe {
        Universe::reference(14).unwrap()
    }

    #[test]
    fn kraft_and_prefix_free_small() {
        let u = small_universe();
        assert!(u.base().kraft_holds());
        assert_eq!(u.base().prefix_violations(), 0);
    }

    #[test]
    fn table_is_deterministic() {
        let a = Universe::reference(12).unwrap();
        let b = Universe::reference(12).unwrap();
        assert_eq!(a.base().len(), b.base().len());
        for (p, e) in a.base().iter() {
            let other = b.base().entry(p).unwrap();
            assert_eq!(e, other);
        }
    }

    #[test]
    fn singleton_witness_length() {
        // A point produced by exactly one program has K = that length.
        let base = ReferenceMachine::new(10).unwrap();
        let far = DyadicPoint::new(vec![1 << 20], 2); // unreachable by the base format
        let d = PlantedDecoder::new(
            base,
            vec![Plant {
                code: Code::from_bit_str("111111"),
                requires_oracle: None,
                point: far.clone(),
            }],
        )
        .unwrap();
        let u = Universe::new(Arc::new(d)).unwrap();
        assert_eq!(u.k(&far), Some(7)); // 1 zone bit + 6 plant bits
    }

    #[test]
    fn k_r_is_monotone_in_r() {
        let u = small_universe();
        for &x in &[0.23f64, -0.57, 0.0, 0.49] {
            let mut last = Some(0);
            for r in 0..=8 {
                let k = u.k_r(&[x], r);
                match (last, k) {
                    (Some(a), Some(b)) => assert!(b >= a, "K_r must be nondecreasing"),
                    (None, Some(_)) => panic!("ball cannot repopulate as r grows"),
                    _ => {}
                }
                last = k;
            }
        }
    }

    #[test]
    fn witness_in_ball_bounds_k_r() {
        let u = small_universe();
        // pick any producible point; K_r(its coords) <= K(point) for every r
        let (p, e) = u.base().iter().next().unwrap();
        let coords = p.coords();
        for r in 0..=6 {
            let k = u.k_r(&coords, r).unwrap();
            assert!(k <= e.k);
        }
    }

    #[test]
    fn relativization_costs_at_most_one_bit() {
        let u = small_universe();
        let q = DyadicPoint::new(vec![1], 2); // 0.25
        let t = u.given_point(&q).unwrap();
        for (p, e) in u.base().iter() {
            // the one-bit ignore-oracle wrapper only fits inside the budget
            if e.k + 1 > u.l_max() {
                continue;
            }
            let rk = t.k(p).expect("mode-0 embeds the base universe");
            assert!(rk <= e.k + 1, "K^A(p) must be <= K(p) + 1");
        }
    }

    #[test]
    fn self_conditioning_is_cheap() {
        let u = small_universe();
        let x = [0.25f64];
        let k = u.conditional_k_r(&x, 4, &x).unwrap();
        assert!(k <= 8, "copy program should bound K_r(x|x), got {k}");
    }

    #[test]
    fn conditional_matches_exhaustive_double_loop() {
        // Independent recomputation of the max-min on a tiny universe.
        let u = Universe::reference(12).unwrap();
        let x = [0.25f64];
        let y = [-0.5f64];
        let (r, s) = (3u32, 2u32);
        let got = u.conditional_k_r_s(&x, r, &y, s);

        let rad_s = f64::powi(2.0, -(s as i32));
        let rad_r = f64::powi(2.0, -(r as i32));
        let mut worst: Option<u32> = None;
        for (q, _) in u.base().iter() {
            if q.dim() != 1 || encode_plain(q).is_none() {
                continue;
            }
            let qc = q.coords();
            if (qc[0] - y[0]).abs() >= rad_s {
                continue;
            }
            let oracle = encode_plain(q).unwrap();
            let mut best: Option<u32> = None;
            for len in 0..=u.l_max() {
                for w in 0..(1u64 << len) {
                    let code = Code::new(len as u8, w as u32);
                    if let Some(p) = u.decoder().decode(code, Some(&oracle)) {
                        if p.dim() == 1 && (p.coords()[0] - x[0]).abs() < rad_r {
                            best = Some(best.map_or(len, |b: u32| b.min(len)));
                        }
                    }
                }
                if best.is_some() {
                    break;
                }
            }
            let best = best.expect("x ball nonempty");
            worst = Some(worst.map_or(best, |w: u32| w.max(best)));
        }
        assert_eq!(got, worst);
    }
}
