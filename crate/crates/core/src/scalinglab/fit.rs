use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// `RMSD(size) ≈ (size / scale_constant)^exponent`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub scale_constant: f64,
    pub exponent: f64,
    /// Root-mean-square residual of the log-log regression (natural log).
    pub rms_residual: f64,
    pub n_points: usize,
    /// Set when the slope vanishes and the scale constant is meaningless.
    pub degenerate: bool,
}

impl PowerLawFit {
    pub fn predict(&self, size: f64) -> f64 {
        (size / self.scale_constant).powf(self.exponent)
    }
}

/// Ordinary least squares of ln RMSD on ln size.
///
/// The slope is the exponent α; the scale constant is
/// `exp(−intercept / α)`. When the slope is within 1e-12 of zero, or so
/// small that the scale constant over- or underflows, the fit is flagged
/// degenerate with exponent 0 and scale constant 1.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    if points.len() < 3 {
        return Err(Error::Domain(format!("need at least 3 points, got {}", points.len())));
    }
    if let Some(p) = points
        .iter()
        .find(|(s, r)| !(*s > 0.0 && *r > 0.0 && s.is_finite() && r.is_finite()))
    {
        return Err(Error::Domain(format!(
            "sizes and RMSDs must be positive and finite, got {p:?}"
        )));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("all sizes are equal".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let scale = (-intercept / slope).exp();
    let degenerate = slope.abs() < 1e-12 || !(scale.is_finite() && scale > 0.0);
    Ok(PowerLawFit {
        scale_constant: if degenerate { 1.0 } else { scale },
        exponent: if degenerate { 0.0 } else { slope },
        rms_residual: (rss / n).sqrt(),
        n_points: points.len(),
        degenerate,
    })
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = avg;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation, ties given their average rank. `None` when
/// either series is constant or the lengths differ.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = rx.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    if vx == 0.0 || vy == 0.0 {
        None
    } else {
        Some(cov / (vx * vy).sqrt())
    }
}
