//! Iterated function systems of contracting similarities and their grid
//! covers.

pub mod cover;
mod engine;

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::FractalError;
use crate::geometry::Direction;

/// Largest ambient dimension the cover engine accepts.
pub const MAX_AMBIENT_DIM: usize = 4;

/// One contracting similarity `x -> ratio * Q x + translation` with `Q`
/// orthogonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityMap {
    pub ratio: f64,
    /// Row-major `n x n` orthogonal matrix.
    pub orthogonal: Vec<Vec<f64>>,
    pub translation: Vec<f64>,
}

impl SimilarityMap {
    /// Similarity with identity orthogonal part.
    pub fn scaling(ratio: f64, translation: Vec<f64>) -> Self {
        let n = translation.len();
        let orthogonal = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        SimilarityMap {
            ratio,
            orthogonal,
            translation,
        }
    }

    /// 2-D rotation by `degrees` composed with scaling.
    pub fn rotation_2d(ratio: f64, degrees: f64, translation: Vec<f64>) -> Self {
        assert_eq!(translation.len(), 2);
        let th = degrees.to_radians();
        let (s, c) = th.sin_cos();
        SimilarityMap {
            ratio,
            orthogonal: vec![vec![c, -s], vec![s, c]],
            translation,
        }
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn validate(&self) -> Result<(), FractalError> {
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(FractalError::BadRatio(self.ratio));
        }
        let n = self.dim();
        if self.orthogonal.len() != n || self.orthogonal.iter().any(|r| r.len() != n) {
            return Err(FractalError::NotOrthogonal {
                deviation: f64::INFINITY,
            });
        }
        // Q^T Q = I within 1e-10
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let dot: f64 = (0..n)
                    .map(|k| self.orthogonal[k][i] * self.orthogonal[k][j])
                    .sum();
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - want).abs());
            }
        }
        if worst > 1e-10 {
            return Err(FractalError::NotOrthogonal { deviation: worst });
        }
        Ok(())
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let rot: f64 = (0..n).map(|j| self.orthogonal[i][j] * x[j]).sum();
                self.ratio * rot + self.translation[i]
            })
            .collect()
    }
}

/// A direction known to project a catalog set below the generic dimension,
/// with the exact value it hits.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExceptionalDirection {
    pub direction: Vec<f64>,
    pub expected_dim: f64,
}

/// An iterated function system with a label and its Moran dimension context.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IfsSpec {
    pub name: String,
    pub maps: Vec<SimilarityMap>,
    /// Declared, not verified; catalog entries are curated.
    pub open_set_condition: bool,
    /// Directions excluded from "almost every" sweeps, with ground truth.
    #[serde(default)]
    pub exceptional: Vec<ExceptionalDirection>,
}

impl IfsSpec {
    pub fn new(
        name: &str,
        maps: Vec<SimilarityMap>,
        open_set_condition: bool,
    ) -> Result<Self, FractalError> {
        let spec = IfsSpec {
            name: name.into(),
            maps,
            open_set_condition,
            exceptional: Vec::new(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), FractalError> {
        if self.maps.is_empty() {
            return Err(FractalError::EmptyIfs);
        }
        let n = self.maps[0].dim();
        for m in &self.maps {
            m.validate()?;
            if m.dim() != n {
                return Err(FractalError::MixedDimension(n, m.dim()));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.maps[0].dim()
    }

    /// Radius of the invariant bounding ball around the origin:
    /// `max ||translation|| / (1 - max ratio)`.
    pub fn bounding_radius(&self) -> f64 {
        let t_max = self
            .maps
            .iter()
            .map(|m| m.translation.iter().map(|v| v * v).sum::<f64>().sqrt())
            .fold(0.0f64, f64::max);
        let c_max = self.maps.iter().map(|m| m.ratio).fold(0.0f64, f64::max);
        t_max / (1.0 - c_max)
    }

    /// The unique `s >= 0` with `sum ratio_i^s = 1`, by bisection to 1e-12.
    pub fn similarity_dimension(&self) -> f64 {
        similarity_dimension(self)
    }

    /// Exceptional directions as unit vectors.
    pub fn exceptional_directions(&self) -> Vec<(Direction, f64)> {
        self.exceptional
            .iter()
            .filter_map(|e| {
                Direction::normalized(e.direction.clone())
                    .ok()
                    .map(|d| (d, e.expected_dim))
            })
            .collect()
    }
}

/// Moran equation solver: the unique `s >= 0` with `sum_i ratio_i^s = 1`.
pub fn similarity_dimension(ifs: &IfsSpec) -> f64 {
    let phi = |s: f64| -> f64 { ifs.maps.iter().map(|m| m.ratio.powf(s)).sum::<f64>() - 1.0 };
    // phi is strictly decreasing; phi(0) = m - 1 >= 0.
    if phi(0.0) <= 0.0 {
        return 0.0;
    }
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    while phi(hi) > 0.0 {
        hi *= 2.0;
        if hi > 1e6 {
            return hi;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if phi(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Curated catalog of attractors with known dimension.
pub fn catalog() -> Vec<IfsSpec> {
    let mut out = Vec::new();

    let mut cantor3 = IfsSpec::new(
        "cantor3",
        vec![
            SimilarityMap::scaling(1.0 / 3.0, vec![0.0]),
            SimilarityMap::scaling(1.0 / 3.0, vec![2.0 / 3.0]),
        ],
        true,
    )
    .unwrap();
    cantor3.exceptional = vec![];
    out.push(cantor3);

    out.push(
        IfsSpec::new(
            "cantor4",
            vec![
                SimilarityMap::scaling(0.25, vec![0.0]),
                SimilarityMap::scaling(0.25, vec![0.75]),
            ],
            true,
        )
        .unwrap(),
    );

    let mut fourcorner = IfsSpec::new(
        "fourcorner",
        vec![
            SimilarityMap::scaling(0.25, vec![0.0, 0.0]),
            SimilarityMap::scaling(0.25, vec![0.75, 0.0]),
            SimilarityMap::scaling(0.25, vec![0.0, 0.75]),
            SimilarityMap::scaling(0.25, vec![0.75, 0.75]),
        ],
        true,
    )
    .unwrap();
    // axis projections collapse onto the ratio-1/4 Cantor set (dim 1/2)
    fourcorner.exceptional = vec![
        ExceptionalDirection {
            direction: vec![1.0, 0.0],
            expected_dim: 0.5,
        },
        ExceptionalDirection {
            direction: vec![0.0, 1.0],
            expected_dim: 0.5,
        },
    ];
    out.push(fourcorner);

    out.push(
        IfsSpec::new(
            "sierpinski",
            vec![
                SimilarityMap::scaling(0.5, vec![0.0, 0.0]),
                SimilarityMap::scaling(0.5, vec![0.5, 0.0]),
                SimilarityMap::scaling(0.5, vec![0.0, 0.5]),
            ],
            true,
        )
        .unwrap(),
    );

    out.push(
        IfsSpec::new(
            "cantor3sq",
            vec![
                SimilarityMap::scaling(1.0 / 3.0, vec![0.0, 0.0]),
                SimilarityMap::scaling(1.0 / 3.0, vec![2.0 / 3.0, 0.0]),
                SimilarityMap::scaling(1.0 / 3.0, vec![0.0, 2.0 / 3.0]),
                SimilarityMap::scaling(1.0 / 3.0, vec![2.0 / 3.0, 2.0 / 3.0]),
            ],
            true,
        )
        .unwrap(),
    );

    let mut flat = IfsSpec::new(
        "cantor3flat",
        vec![
            SimilarityMap::scaling(1.0 / 3.0, vec![0.0, 0.0]),
            SimilarityMap::scaling(1.0 / 3.0, vec![2.0 / 3.0, 0.0]),
        ],
        true,
    )
    .unwrap();
    // C x {0}: projecting along the segment's own axis collapses to a point
    flat.exceptional = vec![
        ExceptionalDirection {
            direction: vec![0.0, 1.0],
            expected_dim: 0.0,
        },
        ExceptionalDirection {
            direction: vec![0.0, -1.0],
            expected_dim: 0.0,
        },
    ];
    out.push(flat);

    out.push(
        IfsSpec::new(
            "square",
            vec![
                SimilarityMap::scaling(0.5, vec![0.0, 0.0]),
                SimilarityMap::scaling(0.5, vec![0.5, 0.0]),
                SimilarityMap::scaling(0.5, vec![0.0, 0.5]),
                SimilarityMap::scaling(0.5, vec![0.5, 0.5]),
            ],
            true,
        )
        .unwrap(),
    );

    let corners3 = [0.0, 0.75];
    let mut dust_maps = Vec::new();
    for &x in &corners3 {
        for &y in &corners3 {
            for &z in &corners3 {
                dust_maps.push(SimilarityMap::scaling(0.25, vec![x, y, z]));
            }
        }
    }
    out.push(IfsSpec::new("dust3", dust_maps, true).unwrap());

    out
}

/// Catalog lookup by name.
pub fn find(name: &str) -> Result<IfsSpec, FractalError> {
    catalog()
        .into_iter()
        .find(|f| f.name == name)
        .ok_or_else(|| FractalError::UnknownFractal(name.into()))
}

#[derive(Debug, Deserialize)]
struct MapFile {
    ratio: f64,
    #[serde(default)]
    rotation_degrees: Option<f64>,
    #[serde(default)]
    matrix: Option<Vec<Vec<f64>>>,
    translation: Vec<f64>,
}

#[derive(Debug, Deserialize)]
struct IfsFile {
    #[serde(default)]
    name: Option<String>,
    maps: Vec<MapFile>,
    #[serde(default)]
    open_set_condition: bool,
}

/// Loads an IFS from a JSON file: `{maps: [{ratio, rotation_degrees|matrix,
/// translation: [...]}, ...]}`.
pub fn load_ifs(path: &Path) -> Result<IfsSpec, FractalError> {
    let text = std::fs::read_to_string(path)?;
    let file: IfsFile = serde_json::from_str(&text)?;
    if file.maps.is_empty() {
        return Err(FractalError::EmptyIfs);
    }
    let maps: Result<Vec<SimilarityMap>, FractalError> = file
        .maps
        .into_iter()
        .map(|m| {
            let sm = match (m.rotation_degrees, m.matrix) {
                (Some(_), Some(_)) => {
                    return Err(FractalError::File(
                        "give rotation_degrees or matrix, not both".into(),
                    ))
                }
                (Some(deg), None) => {
                    if m.translation.len() != 2 {
                        return Err(FractalError::File(
                            "rotation_degrees only applies to 2-D maps".into(),
                        ));
                    }
                    SimilarityMap::rotation_2d(m.ratio, deg, m.translation)
                }
                (None, Some(mat)) => SimilarityMap {
                    ratio: m.ratio,
                    orthogonal: mat,
                    translation: m.translation,
                },
                (None, None) => SimilarityMap::scaling(m.ratio, m.translation),
            };
            Ok(sm)
        })
        .collect();
    let name = file.name.unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "ifs".into())
    });
    let mut spec = IfsSpec::new(&name, maps?, file.open_set_condition)?;
    spec.name = name;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moran_dimension_cantor() {
        let f = find("cantor3").unwrap();
        let s = f.similarity_dimension();
        assert!((s - 2f64.ln() / 3f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn moran_dimension_sierpinski() {
        let f = find("sierpinski").unwrap();
        assert!((f.similarity_dimension() - 3f64.ln() / 2f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn moran_dimension_singleton() {
        let ifs =
            IfsSpec::new("point", vec![SimilarityMap::scaling(0.5, vec![0.0])], true).unwrap();
        assert_eq!(ifs.similarity_dimension(), 0.0);
    }

    #[test]
    fn moran_dimension_fourcorner() {
        let f = find("fourcorner").unwrap();
        assert!((f.similarity_dimension() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn catalog_carries_ground_truth() {
        let lookup = |name: &str| find(name).unwrap().similarity_dimension();
        assert!((lookup("cantor3") - 0.63093).abs() < 1e-4);
        assert!((lookup("fourcorner") - 1.0).abs() < 1e-12);
        assert!((lookup("cantor3sq") - 2.0 * 2f64.ln() / 3f64.ln()).abs() < 1e-10);
        assert!((lookup("dust3") - 1.5).abs() < 1e-10);
        assert!((lookup("square") - 2.0).abs() < 1e-10);
        assert!(find("nonexistent").is_err());
    }

    #[test]
    fn rotation_matrix_is_orthogonal() {
        let m = SimilarityMap::rotation_2d(0.5, 33.0, vec![0.1, 0.2]);
        m.validate().unwrap();
    }

    #[test]
    fn load_ifs_from_json() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ifs.json");
        std::fs::write(
            &path,
            r#"{"maps":[{"ratio":0.5,"translation":[0.0,0.0]},
                        {"ratio":0.5,"rotation_degrees":90.0,"translation":[0.5,0.0]}],
                "open_set_condition":true}"#,
        )
        .unwrap();
        let spec = load_ifs(&path).unwrap();
        assert_eq!(spec.maps.len(), 2);
        assert_eq!(spec.dim(), 2);
        spec.validate().unwrap();
    }
}
