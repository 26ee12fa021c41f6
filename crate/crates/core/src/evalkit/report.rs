use super::symmetry::Automorphisms;
use super::validity::{validity_check, ValidityReport};
use super::{rmsd, IdentityBin};
use crate::molio::{Molecule, Pocket, Pose, Receptor};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Reference side of one benchmark case.
#[derive(Debug, Clone)]
pub struct BenchmarkCase {
    pub id: String,
    pub molecule: Molecule,
    pub reference: Pose,
    /// Needed for validity checks; cases without it are skipped in the
    /// PB-valid rate.
    pub receptor: Option<Receptor>,
    pub pocket: Option<Pocket>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CaseMetadata {
    pub family: Option<String>,
    pub identity: Option<f64>,
    pub identity_bin: Option<IdentityBin>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseResult {
    pub id: String,
    pub rmsd: f64,
    pub rmsd_symm: f64,
    pub symmetry_capped: bool,
    pub identity_bin: Option<IdentityBin>,
    pub family: Option<String>,
    pub validity: Option<ValidityReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinSummary {
    pub n: usize,
    pub success_at_2a: f64,
    pub success_at_1a: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySummary {
    pub n: usize,
    pub rmsds: Vec<f64>,
    pub mean: f64,
    pub median: f64,
    pub success_at_2a: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema_version: u32,
    /// Headline metric used for success fractions.
    pub metric: String,
    pub n_cases: usize,
    pub cases: Vec<CaseResult>,
    pub success_at_2a: f64,
    pub success_at_1a: f64,
    pub success_at_2a_plain: f64,
    pub per_bin: BTreeMap<String, BinSummary>,
    pub per_family: BTreeMap<String, FamilySummary>,
    pub pb_valid_rate: Option<f64>,
    pub notes: Vec<String>,
}

fn fraction(values: &[f64], threshold: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().filter(|&&v| v <= threshold).count() as f64 / values.len() as f64
}

fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Scores predictions against references.
///
/// Success thresholds are RMSD <= 2 Å and <= 1 Å on the symmetry-corrected
/// RMSD. Cases are processed in parallel and aggregated in id order.
pub fn evaluate_benchmark(
    predictions: &BTreeMap<String, Pose>,
    references: &[BenchmarkCase],
    metadata: &BTreeMap<String, CaseMetadata>,
) -> Result<EvalReport> {
    let ref_ids: std::collections::BTreeSet<&str> = references.iter().map(|c| c.id.as_str()).collect();
    let mut orphans: Vec<String> = predictions
        .keys()
        .filter(|k| !ref_ids.contains(k.as_str()))
        .map(|k| format!("prediction:{k}"))
        .collect();
    orphans.extend(
        references
            .iter()
            .filter(|c| !predictions.contains_key(&c.id))
            .map(|c| format!("reference:{}", c.id)),
    );
    if !orphans.is_empty() {
        return Err(Error::Report { orphans });
    }
    let mut sorted: Vec<&BenchmarkCase> = references.iter().collect();
    sorted.sort_by(|a, b| a.id.cmp(&b.id));

    let cases: Vec<CaseResult> = sorted
        .par_iter()
        .map(|case| {
            let pred = &predictions[&case.id];
            let plain = rmsd(&case.reference, pred)?;
            let symm = Automorphisms::of(&case.molecule).min_rmsd(&case.reference, pred)?;
            let meta = metadata.get(&case.id).cloned().unwrap_or_default();
            let validity = match (&case.receptor, &case.pocket) {
                (Some(r), Some(p)) => Some(validity_check(r, p, &case.molecule, pred)),
                _ => None,
            };
            Ok(CaseResult {
                id: case.id.clone(),
                rmsd: plain,
                rmsd_symm: symm.rmsd,
                symmetry_capped: symm.capped,
                identity_bin: meta.identity_bin.or(meta.identity.map(IdentityBin::from_identity)),
                family: meta.family,
                validity,
            })
        })
        .collect::<Result<_>>()?;

    let symm: Vec<f64> = cases.iter().map(|c| c.rmsd_symm).collect();
    let plain: Vec<f64> = cases.iter().map(|c| c.rmsd).collect();

    let mut per_bin = BTreeMap::new();
    for bin in [IdentityBin::Low, IdentityBin::Medium, IdentityBin::High] {
        let v: Vec<f64> = cases
            .iter()
            .filter(|c| c.identity_bin == Some(bin))
            .map(|c| c.rmsd_symm)
            .collect();
        if !v.is_empty() {
            per_bin.insert(
                bin.as_str().to_string(),
                BinSummary {
                    n: v.len(),
                    success_at_2a: fraction(&v, 2.0),
                    success_at_1a: fraction(&v, 1.0),
                },
            );
        }
    }

    let mut families: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for c in &cases {
        if let Some(f) = &c.family {
            families.entry(f.clone()).or_default().push(c.rmsd_symm);
        }
    }
    let per_family = families
        .into_iter()
        .map(|(k, v)| {
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            (
                k,
                FamilySummary {
                    n: v.len(),
                    mean,
                    median: median(&v),
                    success_at_2a: fraction(&v, 2.0),
                    rmsds: v,
                },
            )
        })
        .collect();

    let checked: Vec<bool> = cases.iter().filter_map(|c| c.validity.map(|v| v.pb_valid)).collect();
    let pb_valid_rate = if checked.is_empty() {
        None
    } else {
        Some(checked.iter().filter(|v| **v).count() as f64 / checked.len() as f64)
    };

    Ok(EvalReport {
        schema_version: REPORT_SCHEMA_VERSION,
        metric: "rmsd_symm".into(),
        n_cases: cases.len(),
        success_at_2a: fraction(&symm, 2.0),
        success_at_1a: fraction(&symm, 1.0),
        success_at_2a_plain: fraction(&plain, 2.0),
        cases,
        per_bin,
        per_family,
        pb_valid_rate,
        notes: Vec::new(),
    })
}

impl EvalReport {
    /// Aligned-column summary for terminals.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<24} {:>10}", "metric", "value");
        let _ = writeln!(out, "{:<24} {:>10}", "cases", self.n_cases);
        let _ = writeln!(out, "{:<24} {:>9.1}%", "success@2A (symm)", 100.0 * self.success_at_2a);
        let _ = writeln!(out, "{:<24} {:>9.1}%", "success@1A (symm)", 100.0 * self.success_at_1a);
        let _ = writeln!(
            out,
            "{:<24} {:>9.1}%",
            "success@2A (plain)",
            100.0 * self.success_at_2a_plain
        );
        if let Some(pb) = self.pb_valid_rate {
            let _ = writeln!(out, "{:<24} {:>9.1}%", "pb_valid", 100.0 * pb);
        }
        if !self.per_bin.is_empty() {
            let _ = writeln!(out);
            let _ = writeln!(out, "{:<10} {:>6} {:>10} {:>10}", "identity", "n", "succ@2A", "succ@1A");
            for (bin, s) in &self.per_bin {
                let _ = writeln!(
                    out,
                    "{:<10} {:>6} {:>9.1}% {:>9.1}%",
                    bin,
                    s.n,
                    100.0 * s.success_at_2a,
                    100.0 * s.success_at_1a
                );
            }
        }
        if !self.per_family.is_empty() {
            let _ = writeln!(out);
            let _ = writeln!(
                out,
                "{:<16} {:>6} {:>8} {:>8} {:>10}",
                "family", "n", "mean", "median", "succ@2A"
            );
            for (fam, s) in &self.per_family {
                let _ = writeln!(
                    out,
                    "{:<16} {:>6} {:>8.3} {:>8.3} {:>9.1}%",
                    fam,
                    s.n,
                    s.mean,
                    s.median,
                    100.0 * s.success_at_2a
                );
            }
        }
        for note in &self.notes {
            let _ = writeln!(out, "note: {note}");
        }
        out
    }
}
