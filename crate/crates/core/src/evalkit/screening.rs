use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreenResult {
    pub ids: Vec<String>,
    /// Lower is better.
    pub scores: Vec<f64>,
    pub active: Vec<bool>,
    /// (fraction, EF) pairs.
    pub enrichment: Vec<(f64, f64)>,
}

impl ScreenResult {
    pub fn new(ids: Vec<String>, scores: Vec<f64>, active: Vec<bool>, fractions: &[f64]) -> Result<Self> {
        let enrichment = fractions
            .iter()
            .map(|&f| enrichment_factor(&scores, &active, f).map(|ef| (f, ef)))
            .collect::<Result<_>>()?;
        Ok(Self {
            ids,
            scores,
            active,
            enrichment,
        })
    }
}

/// Enrichment factor at `fraction` of a ranked screen.
///
/// Compounds are ranked by ascending score with ties kept in input order.
/// `n_sel = ceil(fraction * total)`; EF is the active rate among the top
/// `n_sel` divided by the overall active rate.
pub fn enrichment_factor(scores: &[f64], active: &[bool], fraction: f64) -> Result<f64> {
    if scores.len() != active.len() {
        return Err(Error::Contract(format!(
            "{} scores vs {} labels",
            scores.len(),
            active.len()
        )));
    }
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::Domain(format!("fraction {fraction} outside (0, 1]")));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::Domain("NaN score in screen".into()));
    }
    let total = scores.len();
    let n_active = active.iter().filter(|a| **a).count();
    if n_active == 0 {
        return Err(Error::UndefinedEnrichment("screen has no actives".into()));
    }
    let mut order: Vec<usize> = (0..total).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // The small slack keeps products such as 0.05 * 200 from rounding up
    // to the next integer.
    let n_sel = ((fraction * total as f64) - 1e-9).ceil().max(1.0) as usize;
    let n_sel = n_sel.min(total);
    let hits = order[..n_sel].iter().filter(|&&i| active[i]).count();
    Ok((hits as f64 / n_sel as f64) / (n_active as f64 / total as f64))
}
