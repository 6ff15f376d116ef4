//! Batch experiment runner: seeded, reproducible sweeps with persisted
//! reports.

mod run;

pub use run::{
    run_dim_point, run_experiment, run_marstrand, run_packing, run_recovery_sweep, run_toy_verify,
};

use std::path::{Path, PathBuf};
use std::sync::Once;

use serde::{Deserialize, Serialize};

use crate::dimension::DimensionEstimate;
use crate::error::HarnessError;
use crate::toy::constants::ToyConstants;

/// Report schema version.
pub const SCHEMA_VERSION: u32 = 1;

static THREAD_INIT: Once = Once::new();

/// Honors `FRACLAB_THREADS` once per process; silently keeps the default
/// pool when unset or invalid.
pub fn init_thread_pool() {
    THREAD_INIT.call_once(|| {
        if let Ok(v) = std::env::var("FRACLAB_THREADS") {
            if let Ok(n) = v.parse::<usize>() {
                if n >= 1 {
                    let _ = rayon::ThreadPoolBuilder::new()
                        .num_threads(n)
                        .build_global();
                }
            }
        }
    });
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Marstrand,
    Packing,
    ToyVerify,
    RecoverySweep,
    DimPoint,
}

impl std::fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ExperimentKind::Marstrand => "marstrand",
            ExperimentKind::Packing => "packing",
            ExperimentKind::ToyVerify => "toy-verify",
            ExperimentKind::RecoverySweep => "recovery-sweep",
            ExperimentKind::DimPoint => "dim-point",
        };
        write!(f, "{s}")
    }
}

/// Where dim-point experiments draw their point from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointSourceKind {
    Rational,
    SeededRandom,
    FractalSample,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Catalog name; ignored when `ifs_file` is set.
    pub fractal: String,
    pub ifs_file: Option<PathBuf>,
    pub directions: usize,
    pub seed: u64,
    pub window: (u32, u32),
    pub tol: f64,
    /// Tolerance for cataloged exceptional directions.
    pub exceptional_tol: f64,
    /// Instance count for toy-verify and recovery sweeps.
    pub instances: usize,
    /// Toy universe size for toy-verify.
    pub l_max: u32,
    /// Approximation precision for recovery sweeps.
    pub recovery_r: u32,
    pub point_source: PointSourceKind,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            kind: ExperimentKind::Marstrand,
            fractal: "fourcorner".into(),
            ifs_file: None,
            directions: 100,
            seed: 0,
            window: crate::dimension::DEFAULT_WINDOW,
            tol: 0.1,
            exceptional_tol: 0.07,
            instances: 100,
            l_max: 16,
            recovery_r: 30,
            point_source: PointSourceKind::SeededRandom,
            out: None,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.directions < 1 {
            return Err(HarnessError::Config("direction count must be >= 1".into()));
        }
        if self.window.0 > self.window.1 {
            return Err(HarnessError::Config(format!(
                "window [{}, {}] is inverted",
                self.window.0, self.window.1
            )));
        }
        Ok(())
    }

    /// Stable hash of the canonical JSON form, for report provenance.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.out = None;
        let text = serde_json::to_string(&canonical).expect("config serializes");
        format!("{:016x}", fnv1a(text.as_bytes()))
    }

    pub fn ifs(&self) -> Result<crate::fractals::IfsSpec, HarnessError> {
        match &self.ifs_file {
            Some(p) => Ok(crate::fractals::load_ifs(p)?),
            None => Ok(crate::fractals::find(&self.fractal)?),
        }
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DirectionRecord {
    pub index: usize,
    pub direction: Vec<f64>,
    pub estimate: DimensionEstimate,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExceptionalRecord {
    pub direction: Vec<f64>,
    pub expected_dim: f64,
    pub estimate: DimensionEstimate,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Summary {
    pub median_slope: Option<f64>,
    pub fraction_above_threshold: Option<f64>,
    pub threshold: Option<f64>,
    pub records: usize,
}

/// One freeform row of a toy-verify or dim-point run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckRow {
    pub kind: String,
    pub index: usize,
    pub pass: Option<bool>,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecoveryRow {
    pub seed: u64,
    pub n: usize,
    pub r: u32,
    pub t: f64,
    pub error: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema: u32,
    pub kind: ExperimentKind,
    pub config_hash: String,
    pub seed: u64,
    pub estimator_ids: Vec<String>,
    pub constants_version: String,
    pub ground_truth_s: Option<f64>,
    pub records: Vec<DirectionRecord>,
    pub exceptional: Vec<ExceptionalRecord>,
    pub checks: Vec<CheckRow>,
    pub recovery_rows: Vec<RecoveryRow>,
    pub profiles: Vec<crate::estimators::ComplexityProfile>,
    pub summary: Summary,
    pub verdicts: Vec<Verdict>,
    /// Wall-clock stamp; the only field exempt from byte-level
    /// reproducibility.
    pub generated_unix_ms: u64,
}

impl ExperimentReport {
    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    /// JSON with the timestamp zeroed, for reproducibility comparisons.
    pub fn canonical_json(&self) -> String {
        let mut copy = self.clone();
        copy.generated_unix_ms = 0;
        serde_json::to_string_pretty(&copy).expect("report serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Per-record CSV matching the experiment kind.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match self.kind {
            ExperimentKind::Marstrand | ExperimentKind::Packing => {
                out.push_str("index,direction,slope,intercept,rms,r_min,r_max,mode\n");
                for r in &self.records {
                    let dir = r
                        .direction
                        .iter()
                        .map(|c| format!("{c}"))
                        .collect::<Vec<_>>()
                        .join(";");
                    out.push_str(&format!(
                        "{},{},{},{},{},{},{},{}\n",
                        r.index,
                        dir,
                        r.estimate.slope,
                        r.estimate.intercept,
                        r.estimate.rms,
                        r.estimate.r_min,
                        r.estimate.r_max,
                        r.estimate.mode
                    ));
                }
                for e in &self.exceptional {
                    let dir = e
                        .direction
                        .iter()
                        .map(|c| format!("{c}"))
                        .collect::<Vec<_>>()
                        .join(";");
                    out.push_str(&format!(
                        "exceptional,{},{},{},{},{},{},{}\n",
                        dir,
                        e.estimate.slope,
                        e.estimate.intercept,
                        e.estimate.rms,
                        e.estimate.r_min,
                        e.estimate.r_max,
                        e.estimate.mode
                    ));
                }
            }
            ExperimentKind::ToyVerify => {
                out.push_str("kind,index,pass,detail\n");
                for c in &self.checks {
                    out.push_str(&format!(
                        "{},{},{},{}\n",
                        c.kind,
                        c.index,
                        c.pass.map(|p| p.to_string()).unwrap_or_else(|| "-".into()),
                        c.detail.replace(',', ";")
                    ));
                }
            }
            ExperimentKind::DimPoint => {
                out.push_str("r,k_r\n");
                for p in &self.profiles {
                    for (r, k) in &p.samples {
                        out.push_str(&format!("{r},{k}\n"));
                    }
                }
            }
            ExperimentKind::RecoverySweep => {
                out.push_str("seed,n,r,t,error,bound,pass\n");
                for r in &self.recovery_rows {
                    out.push_str(&format!(
                        "{},{},{},{},{},{},{}\n",
                        r.seed, r.n, r.r, r.t, r.error, r.bound, r.pass
                    ));
                }
            }
        }
        out
    }

    /// Writes `<base>.json` and `<base>.csv` side by side.
    pub fn write(&self, base: &Path) -> Result<(), HarnessError> {
        let json_path = base.with_extension("json");
        let csv_path = base.with_extension("csv");
        std::fs::write(json_path, self.to_json())?;
        std::fs::write(csv_path, self.to_csv())?;
        Ok(())
    }
}

pub(crate) fn now_ms() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

pub(crate) fn empty_report(
    kind: ExperimentKind,
    config: &ExperimentConfig,
    constants: &ToyConstants,
) -> ExperimentReport {
    ExperimentReport {
        schema: SCHEMA_VERSION,
        kind,
        config_hash: config.hash(),
        seed: config.seed,
        estimator_ids: vec![],
        constants_version: constants.version.clone(),
        ground_truth_s: None,
        records: vec![],
        exceptional: vec![],
        checks: vec![],
        recovery_rows: vec![],
        profiles: vec![],
        summary: Summary {
            median_slope: None,
            fraction_above_threshold: None,
            threshold: None,
            records: 0,
        },
        verdicts: vec![],
        generated_unix_ms: now_ms(),
    }
}
