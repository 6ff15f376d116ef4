//! Frozen slack constants for the toy-universe verifiers.
//!
//! The inequalities being checked hold up to additive terms that are
//! existential in the underlying arguments. Tests need concrete numbers, so
//! each term was measured once on the reference universe (`l_max = 16`,
//! seeded instance sweeps) and frozen here. Verifiers assert against these
//! frozen values; they are not refitted at test time.

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::HarnessError;

/// Coefficient of the `log2 r` part of the point-lemma slack `C1`.
pub const C1_LOG_COEFF: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToyConstants {
    /// Coefficient of `log2 r` in both symmetry-of-information deviations.
    pub c_sym: f64,
    /// Additive part of the symmetry-of-information bound.
    pub c_sym2: f64,
    /// Additive part of the point-lemma slack; the full term is
    /// `C1_LOG_COEFF * log2(r) + C1`.
    #[serde(rename = "C1")]
    pub c1: f64,
    /// Additive slack of the projection-bound conclusion.
    #[serde(rename = "C2")]
    pub c2: f64,
    /// Copy-program bound: `K_{r,r}(x | x) <= c_copy` for dimensions <= 7.
    pub c_copy: u32,
    /// Identifies the frozen set; reports carry it for provenance.
    pub version: String,
    /// Where each number came from.
    pub provenance: std::collections::BTreeMap<String, String>,
}

impl Default for ToyConstants {
    fn default() -> Self {
        let mut provenance = std::collections::BTreeMap::new();
        provenance.insert(
            "c_sym,c_sym2".into(),
            "worst deviations over 400 seeded (x,y,r,s) tuples on the reference universe \
             (l_max=16, r<=3) were 5 (chain) and 8 (self); frozen with 4 bits of headroom"
                .into(),
        );
        provenance.insert(
            "C1".into(),
            "fitted once on reference-universe point-lemma instances with unique short-program \
             points; full slack is 3*log2(r) + C1"
                .into(),
        );
        provenance.insert(
            "C2".into(),
            "fitted once on reference-universe projection-bound instances satisfying both \
             conditions"
                .into(),
        );
        provenance.insert(
            "c_copy".into(),
            "delta-mode copy program: 1 + |gamma(n)| + 1 bits, n <= 7".into(),
        );
        ToyConstants {
            c_sym: 4.0,
            c_sym2: 12.0,
            c1: 16.0,
            c2: 16.0,
            c_copy: 8,
            version: "frozen-v1".into(),
            provenance,
        }
    }
}

impl ToyConstants {
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: &Path) -> Result<(), HarnessError> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text)?;
        Ok(())
    }

    /// Symmetry-of-information slack at precision `r`.
    pub fn symmetry_bound(&self, r: u32) -> f64 {
        self.c_sym * (r.max(1) as f64).log2() + self.c_sym2
    }

    /// Point-lemma slack at precision `r`.
    pub fn c1_at(&self, r: u32) -> f64 {
        C1_LOG_COEFF * (r.max(1) as f64).log2() + self.c1
    }
}
