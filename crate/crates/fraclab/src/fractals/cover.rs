//! Grid covers: occupied dyadic cells at a fixed precision.

use std::collections::BTreeSet;
use std::io::Write;

use crate::error::FractalError;
use crate::geometry::Direction;

use super::engine::{self, Engine};
use super::IfsSpec;

/// Default ceiling on cover precision; beyond it generation refuses.
pub const DEFAULT_MAX_PRECISION: u32 = 24;

/// The set of occupied dyadic cells at precision `r` covering a set. Cell
/// `c` denotes the box `prod_i [c_i 2^-r, (c_i+1) 2^-r)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridCover {
    precision: u32,
    dim: usize,
    cells: BTreeSet<Vec<i64>>,
}

impl GridCover {
    pub fn new(precision: u32, dim: usize, cells: BTreeSet<Vec<i64>>) -> Self {
        debug_assert!(cells.iter().all(|c| c.len() == dim));
        GridCover {
            precision,
            dim,
            cells,
        }
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, cell: &[i64]) -> bool {
        self.cells.contains(cell)
    }

    pub fn cells(&self) -> impl Iterator<Item = &Vec<i64>> {
        self.cells.iter()
    }

    /// Pure grid refinement: each cell splits into its `2^n` children at
    /// precision `r + 1`.
    pub fn refine(&self) -> GridCover {
        let mut cells = BTreeSet::new();
        let n = self.dim;
        for cell in &self.cells {
            for ch in 0..(1u32 << n) {
                let child: Vec<i64> = (0..n)
                    .map(|i| 2 * cell[i] + ((ch >> i) & 1) as i64)
                    .collect();
                cells.insert(child);
            }
        }
        GridCover {
            precision: self.precision + 1,
            dim: n,
            cells,
        }
    }

    /// Pure grid coarsening to precision `r - 1` (floor division of indices).
    pub fn coarsen(&self) -> GridCover {
        assert!(self.precision > 0, "cannot coarsen past precision 0");
        let cells = self
            .cells
            .iter()
            .map(|cell| cell.iter().map(|&c| c.div_euclid(2)).collect())
            .collect();
        GridCover {
            precision: self.precision - 1,
            dim: self.dim,
            cells,
        }
    }

    pub fn is_subset_of(&self, other: &GridCover) -> bool {
        self.cells.is_subset(&other.cells)
    }

    /// CSV export: header `r,n,cell_index_0..cell_index_{n-1}`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let idx_cols: Vec<String> = (0..self.dim).map(|i| format!("cell_index_{i}")).collect();
        writeln!(w, "r,n,{}", idx_cols.join(","))?;
        for cell in &self.cells {
            let cols: Vec<String> = cell.iter().map(|c| c.to_string()).collect();
            writeln!(w, "{},{},{}", self.precision, self.dim, cols.join(","))?;
        }
        Ok(())
    }
}

/// All grid cells at precision `r` meeting the attractor (outer
/// approximation: sound, tight up to one neighboring cell per boundary).
pub fn generate_cover(
    ifs: &IfsSpec,
    r: u32,
    max_precision: u32,
) -> Result<GridCover, FractalError> {
    if r > max_precision {
        return Err(FractalError::PrecisionLimit {
            requested: r,
            max: max_precision,
        });
    }
    let eng = Engine::new(ifs)?;
    let cells = engine::collect_cells(&eng, r);
    Ok(GridCover::new(r, ifs.dim(), cells.into_iter().collect()))
}

/// Occupied-cell counts at every precision `0..=r_max` in one pass.
pub fn count_series(
    ifs: &IfsSpec,
    r_max: u32,
    max_precision: u32,
) -> Result<Vec<u64>, FractalError> {
    if r_max > max_precision {
        return Err(FractalError::PrecisionLimit {
            requested: r_max,
            max: max_precision,
        });
    }
    let eng = Engine::new(ifs)?;
    Ok(engine::count_series_engine(&eng, r_max))
}

/// Projection of a cover onto the line through `e`: each cell's projected
/// interval (over its corners) is rasterized onto the 1-D grid at the same
/// precision.
pub fn project_cover(cover: &GridCover, e: &Direction) -> GridCover {
    assert_eq!(e.dim(), cover.dim(), "direction dimension must match cover");
    let mut cells = BTreeSet::new();
    for cell in cover.cells() {
        let (lo, hi) = engine::project_cell_range(cell, cover.precision(), e.components());
        for i in lo..=hi {
            cells.insert(vec![i]);
        }
    }
    GridCover::new(cover.precision(), 1, cells)
}

/// Counts of the projected covers of one attractor in many directions, for
/// every precision in `r_lo..=r_hi`, sharing a single cell-tree walk per
/// direction chunk. Equals `project_cover(generate_cover(ifs, r), e).len()`
/// pointwise.
pub fn projection_count_series(
    ifs: &IfsSpec,
    dirs: &[Direction],
    r_lo: u32,
    r_hi: u32,
    max_precision: u32,
) -> Result<Vec<Vec<u64>>, FractalError> {
    if r_hi > max_precision {
        return Err(FractalError::PrecisionLimit {
            requested: r_hi,
            max: max_precision,
        });
    }
    for d in dirs {
        if d.dim() != ifs.dim() {
            return Err(FractalError::MixedDimension(ifs.dim(), d.dim()));
        }
    }
    let eng = Engine::new(ifs)?;
    Ok(engine::project_count_series_batch(&eng, dirs, r_lo, r_hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fractals::{find, IfsSpec, SimilarityMap};

    #[test]
    fn cantor3_quarter_grid_cells() {
        // the hand intersection of [0,1/3] u [2/3,1] with the quarter grid
        // gives cells 0..=3; the outer ball approximation may add the single
        // neighbor at the origin fixed point, never the tangent right edge
        let ifs = find("cantor3").unwrap();
        let cover = generate_cover(&ifs, 2, DEFAULT_MAX_PRECISION).unwrap();
        for want in 0..=3i64 {
            assert!(cover.contains(&[want]));
        }
        assert!(!cover.contains(&[4]));
        assert!(cover.cells().all(|c| (-1..=3).contains(&c[0])));
    }

    #[test]
    fn singleton_attractor_stays_at_origin() {
        // Outer ball approximation marks the cells touching the fixed point;
        // the cell owning the origin is always among them and nothing else is.
        let ifs =
            IfsSpec::new("point", vec![SimilarityMap::scaling(0.5, vec![0.0])], true).unwrap();
        for r in [0u32, 3, 8] {
            let cover = generate_cover(&ifs, r, DEFAULT_MAX_PRECISION).unwrap();
            assert!(cover.contains(&[0]));
            assert!(cover.len() <= 2);
            for cell in cover.cells() {
                assert!(
                    cell[0] == 0 || cell[0] == -1,
                    "cell {cell:?} away from origin"
                );
            }
        }
    }

    #[test]
    fn unit_square_is_space_filling() {
        let ifs = find("square").unwrap();
        for r in [1u32, 3, 5] {
            let cover = generate_cover(&ifs, r, DEFAULT_MAX_PRECISION).unwrap();
            for x in 0..(1i64 << r) {
                for y in 0..(1i64 << r) {
                    assert!(cover.contains(&[x, y]));
                }
            }
            // outer ring only ever adds the cells hugging the boundary
            let interior = 1u64 << (2 * r);
            assert!((cover.len() as u64) <= interior + 8 * (1 << r) + 8);
        }
    }

    #[test]
    fn precision_limit_refused() {
        let ifs = find("cantor3").unwrap();
        let err = generate_cover(&ifs, 30, DEFAULT_MAX_PRECISION);
        assert!(matches!(err, Err(FractalError::PrecisionLimit { .. })));
    }

    #[test]
    fn refine_then_coarsen_is_identity() {
        let ifs = find("fourcorner").unwrap();
        let cover = generate_cover(&ifs, 4, DEFAULT_MAX_PRECISION).unwrap();
        assert_eq!(cover.refine().coarsen(), cover);
    }

    #[test]
    fn finer_covers_coarsen_into_parents() {
        for name in ["cantor3", "fourcorner", "sierpinski"] {
            let ifs = find(name).unwrap();
            let fine = generate_cover(&ifs, 7, DEFAULT_MAX_PRECISION).unwrap();
            let coarse = generate_cover(&ifs, 6, DEFAULT_MAX_PRECISION).unwrap();
            assert!(fine.coarsen().is_subset_of(&coarse), "{name}");
        }
    }

    #[test]
    fn axis_projection_takes_first_coordinates() {
        let ifs = find("fourcorner").unwrap();
        let cover = generate_cover(&ifs, 5, DEFAULT_MAX_PRECISION).unwrap();
        let e = Direction::new(vec![1.0, 0.0]).unwrap();
        let proj = project_cover(&cover, &e);
        let first: BTreeSet<Vec<i64>> = cover.cells().map(|c| vec![c[0]]).collect();
        assert_eq!(proj.cells, first);
    }

    #[test]
    fn fourcorner_axis_projection_is_quarter_cantor() {
        // product structure: projecting C_{1/4} x C_{1/4} onto the x-axis
        // yields the 1-D ratio-1/4 Cantor cover, up to the wider planar
        // ball's boundary cells
        let four = find("fourcorner").unwrap();
        let c4 = find("cantor4").unwrap();
        let r = 8;
        let proj = project_cover(
            &generate_cover(&four, r, DEFAULT_MAX_PRECISION).unwrap(),
            &Direction::new(vec![1.0, 0.0]).unwrap(),
        );
        let line = generate_cover(&c4, r, DEFAULT_MAX_PRECISION).unwrap();
        assert!(line.is_subset_of(&proj));
        // the planar ball is sqrt(2) wider than the 1-D one, so each Cantor
        // block may pick up one extra boundary cell; never more than that
        assert!(
            proj.len() <= 2 * line.len(),
            "{} vs {}",
            proj.len(),
            line.len()
        );
    }

    #[test]
    fn single_cell_diagonal_projection() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let e = Direction::new(vec![s, s]).unwrap();
        let mut cells = BTreeSet::new();
        cells.insert(vec![0i64, 0]);
        let cover = GridCover::new(4, 2, cells);
        let proj = project_cover(&cover, &e);
        // corners project onto [0, 2 * 2^-4 / sqrt(2)]: cells 0..=1
        let got: Vec<i64> = proj.cells().map(|c| c[0]).collect();
        assert_eq!(got, vec![0, 1]);
    }

    #[test]
    fn batched_projection_matches_direct_composition() {
        let ifs = find("fourcorner").unwrap();
        let dirs = vec![
            Direction::new(vec![1.0, 0.0]).unwrap(),
            Direction::normalized(vec![0.6, 0.8]).unwrap(),
            Direction::normalized(vec![-0.3, 1.1]).unwrap(),
        ];
        let batch = projection_count_series(&ifs, &dirs, 2, 7, DEFAULT_MAX_PRECISION).unwrap();
        for (di, e) in dirs.iter().enumerate() {
            for (li, r) in (2u32..=7).enumerate() {
                let direct =
                    project_cover(&generate_cover(&ifs, r, DEFAULT_MAX_PRECISION).unwrap(), e);
                assert_eq!(
                    batch[di][li],
                    direct.len() as u64,
                    "dir {di} r {r}: batch disagrees with direct pipeline"
                );
            }
        }
    }

    #[test]
    fn projection_count_bounded_by_cover_count() {
        let ifs = find("sierpinski").unwrap();
        let cover = generate_cover(&ifs, 7, DEFAULT_MAX_PRECISION).unwrap();
        let mut rng = {
            use rand::SeedableRng;
            rand_chacha::ChaCha8Rng::seed_from_u64(5)
        };
        for _ in 0..5 {
            let e = crate::geometry::sample_direction(2, &mut rng);
            let proj = project_cover(&cover, &e);
            assert!(proj.len() <= 2 * ifs.dim() * cover.len());
        }
    }

    #[test]
    fn csv_shape() {
        let mut cells = BTreeSet::new();
        cells.insert(vec![0i64, -2]);
        cells.insert(vec![3i64, 1]);
        let cover = GridCover::new(5, 2, cells);
        let mut buf = Vec::new();
        cover.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines,
            vec!["r,n,cell_index_0,cell_index_1", "5,2,0,-2", "5,2,3,1"]
        );
    }
}
