//! Box-counting dimension estimation from cover-count series.
//!
//! Least-squares slope of `log2 N_r` against `r` proxies the dimension;
//! liminf/limsup modes take the extreme two-point slopes anchored at the
//! window start, proxying the lower (Hausdorff side) and upper (packing
//! side) box dimensions.

use serde::{Deserialize, Serialize};

use crate::error::{DimensionError, FractalError};
use crate::fractals::cover::{self, DEFAULT_MAX_PRECISION};
use crate::fractals::IfsSpec;
use crate::geometry::Direction;

/// Least samples a regression window must contain.
pub const MIN_WINDOW_SAMPLES: usize = 4;
/// Default regression window; precisions below 8 are transient.
pub const DEFAULT_WINDOW: (u32, u32) = (8, 20);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Ls,
    LimInf,
    LimSup,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Ls => write!(f, "ls"),
            Mode::LimInf => write!(f, "liminf"),
            Mode::LimSup => write!(f, "limsup"),
        }
    }
}

/// Cover counts `(r, N_r)` with strictly increasing `r` and `N_r >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountSeries {
    points: Vec<(u32, u64)>,
}

impl CountSeries {
    pub fn new(points: Vec<(u32, u64)>) -> Result<Self, DimensionError> {
        if points.is_empty() {
            return Err(DimensionError::BadSeries);
        }
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(DimensionError::BadSeries);
            }
        }
        if points.iter().any(|&(_, n)| n == 0) {
            return Err(DimensionError::BadSeries);
        }
        Ok(CountSeries { points })
    }

    /// Counts indexed by consecutive precisions `0..counts.len()`.
    pub fn from_consecutive(counts: &[u64]) -> Result<Self, DimensionError> {
        CountSeries::new(
            counts
                .iter()
                .enumerate()
                .map(|(r, &n)| (r as u32, n))
                .collect(),
        )
    }

    pub fn points(&self) -> &[(u32, u64)] {
        &self.points
    }

    /// `log2 N_r <= n r` for covers of subsets of `R^n` (up to the outer
    /// approximation's boundary ring).
    pub fn validate_ambient(&self, n: usize) -> bool {
        self.points
            .iter()
            .all(|&(r, c)| (c as f64).log2() <= n as f64 * r as f64 + (n as f64 + 3.0))
    }
}

/// A regression-based dimension estimate over a window of precisions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionEstimate {
    pub slope: f64,
    pub intercept: f64,
    pub rms: f64,
    pub r_min: u32,
    pub r_max: u32,
    pub mode: Mode,
}

/// Regression of `log2 N_r` against `r` over the window.
///
/// `Ls` fits least squares; `LimInf`/`LimSup` take the min/max two-point
/// slope anchored at the first window sample. A constant series yields slope
/// zero in every mode.
pub fn box_dimension(
    series: &CountSeries,
    window: (u32, u32),
    mode: Mode,
) -> Result<DimensionEstimate, DimensionError> {
    let (r_min, r_max) = window;
    let pts: Vec<(f64, f64)> = series
        .points()
        .iter()
        .filter(|&&(r, _)| r >= r_min && r <= r_max)
        .map(|&(r, n)| (r as f64, (n as f64).log2()))
        .collect();
    if pts.len() < MIN_WINDOW_SAMPLES {
        return Err(DimensionError::WindowTooSmall {
            r_min,
            r_max,
            found: pts.len(),
            need: MIN_WINDOW_SAMPLES,
        });
    }

    let (slope, intercept) = match mode {
        Mode::Ls => {
            let n = pts.len() as f64;
            let sx: f64 = pts.iter().map(|p| p.0).sum();
            let sy: f64 = pts.iter().map(|p| p.1).sum();
            let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
            let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
            let denom = n * sxx - sx * sx;
            let slope = (n * sxy - sx * sy) / denom;
            (slope, (sy - slope * sx) / n)
        }
        Mode::LimInf | Mode::LimSup => {
            let (x0, y0) = pts[0];
            let slopes = pts[1..].iter().map(|&(x, y)| (y - y0) / (x - x0));
            let slope = match mode {
                Mode::LimInf => slopes.fold(f64::INFINITY, f64::min),
                _ => slopes.fold(f64::NEG_INFINITY, f64::max),
            };
            // constant series: all two-point slopes are 0 already
            let slope = if slope.is_finite() { slope } else { 0.0 };
            (slope, y0 - slope * x0)
        }
    };

    let rms = (pts
        .iter()
        .map(|&(x, y)| {
            let e = y - (slope * x + intercept);
            e * e
        })
        .sum::<f64>()
        / pts.len() as f64)
        .sqrt();

    Ok(DimensionEstimate {
        slope,
        intercept,
        rms,
        r_min,
        r_max,
        mode,
    })
}

/// Box-count series of a catalog or loaded IFS up to `r_max`.
pub fn ifs_count_series(ifs: &IfsSpec, r_max: u32) -> Result<CountSeries, FractalError> {
    let counts = cover::count_series(ifs, r_max, DEFAULT_MAX_PRECISION)?;
    Ok(CountSeries::from_consecutive(&counts).expect("engine counts are positive"))
}

/// Dimension of the attractor itself over the window.
pub fn ifs_box_dimension(
    ifs: &IfsSpec,
    window: (u32, u32),
    mode: Mode,
) -> Result<DimensionEstimate, FractalError> {
    let series = ifs_count_series(ifs, window.1)?;
    box_dimension(&series, window, mode).map_err(|e| FractalError::File(e.to_string()))
}

/// Composition generate_cover -> project_cover -> box_dimension (ls mode):
/// the estimate for `dim(proj_e E)`.
pub fn projection_dimension(
    ifs: &IfsSpec,
    e: &Direction,
    window: (u32, u32),
) -> Result<DimensionEstimate, FractalError> {
    let series = projection_series(ifs, std::slice::from_ref(e), window)?
        .pop()
        .expect("one series per direction");
    box_dimension(&series, window, Mode::Ls).map_err(|err| FractalError::File(err.to_string()))
}

/// Projected count series for a batch of directions over the window.
pub fn projection_series(
    ifs: &IfsSpec,
    dirs: &[Direction],
    window: (u32, u32),
) -> Result<Vec<CountSeries>, FractalError> {
    let (r_lo, r_hi) = window;
    let per_dir = cover::projection_count_series(ifs, dirs, r_lo, r_hi, DEFAULT_MAX_PRECISION)?;
    Ok(per_dir
        .into_iter()
        .map(|counts| {
            CountSeries::new(
                counts
                    .iter()
                    .enumerate()
                    .map(|(i, &n)| (r_lo + i as u32, n.max(1)))
                    .collect(),
            )
            .expect("window is increasing")
        })
        .collect())
}
