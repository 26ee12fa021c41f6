//! Evaluation protocols: pose RMSD (plain and symmetry-corrected),
//! physical validity checks, sequence identity and stratification,
//! enrichment factors, synthetic apo receptors and benchmark reports.

mod align;
mod apo;
mod report;
mod rmsd;
mod screening;
mod symmetry;
mod validity;

pub use align::{align_global, sequence_identity, AlignmentSummary};
pub use apo::{make_apo, APO_MIN_DISTANCE};
pub use report::{
    evaluate_benchmark, BenchmarkCase, BinSummary, CaseMetadata, CaseResult, EvalReport, FamilySummary,
    REPORT_SCHEMA_VERSION,
};
pub use rmsd::{rmsd, rmsd_coords};
pub use screening::{enrichment_factor, ScreenResult};
pub use symmetry::{rmsd_symm, Automorphisms, SymmetryRmsd, AUTOMORPHISM_CAP};
pub use validity::{ideal_angle, ideal_bond_length, validity_check, ValidityReport};

use serde::{Deserialize, Serialize};

/// Sequence-identity bins: low [0, 0.30], medium (0.30, 0.90], high (0.90, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IdentityBin {
    Low,
    Medium,
    High,
}

impl IdentityBin {
    pub fn from_identity(identity: f64) -> Self {
        if identity <= 0.30 {
            IdentityBin::Low
        } else if identity <= 0.90 {
            IdentityBin::Medium
        } else {
            IdentityBin::High
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            IdentityBin::Low => "low",
            IdentityBin::Medium => "medium",
            IdentityBin::High => "high",
        }
    }
}

/// Bins each test sequence by its maximum identity to any training
/// sequence. An empty training set puts every case in `Low`.
pub fn stratify(test: &[&str], train: &[&str]) -> Vec<(f64, IdentityBin)> {
    test.iter()
        .map(|t| {
            let best = train.iter().map(|r| sequence_identity(t, r)).fold(0.0, f64::max);
            (best, IdentityBin::from_identity(best))
        })
        .collect()
}
