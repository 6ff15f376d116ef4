//! Error types, one enum per subsystem.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("direction must have at least one component")]
    EmptyDirection,
    #[error("direction norm {norm} is not within 1e-12 of 1")]
    NotUnit { norm: f64 },
    #[error("cannot normalize a zero or non-finite vector")]
    ZeroVector,
}

#[derive(Debug, Error)]
pub enum FractalError {
    #[error("IFS must contain at least one map")]
    EmptyIfs,
    #[error("contraction ratio {0} is outside (0, 1)")]
    BadRatio(f64),
    #[error("orthogonal part fails Q^T Q = I by {deviation} (tolerance 1e-10)")]
    NotOrthogonal { deviation: f64 },
    #[error("maps disagree on dimension: {0} vs {1}")]
    MixedDimension(usize, usize),
    #[error("cover engine supports dimension <= {max}, got {got}")]
    DimensionTooLarge { got: usize, max: usize },
    #[error("precision {requested} exceeds the configured maximum {max}")]
    PrecisionLimit { requested: u32, max: u32 },
    #[error("no catalog fractal named {0:?}")]
    UnknownFractal(String),
    #[error("IFS file: {0}")]
    File(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Error)]
pub enum DimensionError {
    #[error("regression window [{r_min}, {r_max}] holds {found} samples; need at least {need}")]
    WindowTooSmall {
        r_min: u32,
        r_max: u32,
        found: usize,
        need: usize,
    },
    #[error("count series must be nonempty with strictly increasing r")]
    BadSeries,
}

#[derive(Debug, Error)]
pub enum ToyError {
    #[error("program length bound {requested} exceeds the enumeration budget (max {max})")]
    BudgetExceeded { requested: u32, max: u32 },
    #[error("planted code table is not prefix-free: {0}")]
    PlantClash(String),
}

#[derive(Debug, Error)]
pub enum EstimatorError {
    #[error("precision {requested} exceeds the {max}-bit expansion limit")]
    PrecisionLimit { requested: u32, max: u32 },
    #[error("profile tail window holds {found} samples; need at least {need}")]
    ProfileTooShort { found: usize, need: usize },
}

#[derive(Debug, Error)]
pub enum RecoveryError {
    #[error("z and w coincide; no direction information")]
    IdenticalPoints,
    #[error("e.(z-w) = {0} is not 0 within tolerance; points are not on a common level set")]
    NotOnLevelSet(f64),
    #[error("no coordinate with opposite sign found; instance is numerically degenerate")]
    NoOppositeSign,
    #[error("leading quadratic coefficient vanishes; degenerate instance")]
    DegenerateInstance,
    #[error("discriminant {0} is negative beyond tolerance; approximations are inconsistent")]
    InconsistentApproximation(f64),
    #[error("t = {t} outside (0, r]; instance not in the lemma's regime")]
    BadLogDistance { t: f64 },
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Fractal(#[from] FractalError),
    #[error(transparent)]
    Dimension(#[from] DimensionError),
    #[error(transparent)]
    Toy(#[from] ToyError),
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
