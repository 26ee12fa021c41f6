//! Sample-then-rank inference.

use super::features::ComplexInput;
use super::schedule::{standard_normal_vec3, DiffusionSchedule};
use super::train::Denoiser;
use crate::evalkit::validity_check;
use crate::geom::Vec3;
use crate::minidock::Scorer;
use crate::molio::{Molecule, Pocket, Pose, Provenance, Receptor};
use crate::rng::child_rng;
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Added to the docking score per failed validity check.
pub const VALIDITY_PENALTY: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ranking {
    PhysicsScore,
    PhysicsScorePlusValidity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PredictConfig {
    pub n_samples: usize,
    /// Reverse steps; fewer than T visits an evenly spaced subset of
    /// timesteps that always starts at T.
    pub refine_iters: usize,
    pub ranking: Ranking,
    pub schedule: DiffusionSchedule,
}

impl Default for PredictConfig {
    fn default() -> Self {
        Self {
            n_samples: 16,
            refine_iters: 20,
            ranking: Ranking::PhysicsScorePlusValidity,
            schedule: DiffusionSchedule::default(),
        }
    }
}

/// Timesteps visited by the reverse process, descending from T.
pub fn reverse_timesteps(steps: usize, refine_iters: usize) -> Vec<usize> {
    let k = refine_iters.min(steps);
    if k == 0 {
        return Vec::new();
    }
    let mut ts: Vec<usize> = (0..k)
        .map(|i| steps - ((i * steps) as f64 / k as f64).floor() as usize)
        .collect();
    ts.dedup();
    ts
}

/// Runs the deterministic reverse process from `x` at timestep `ts[0]`.
/// Each step moves to `x0_hat + σ_next/σ_t · (x − x0_hat)`, σ_next = 0
/// after the last visited timestep.
pub fn reverse_process<D: Denoiser>(
    model: &D,
    input: &ComplexInput,
    schedule: &DiffusionSchedule,
    ts: &[usize],
    mut x: Vec<Vec3>,
) -> Result<Vec<Vec3>> {
    for (k, &t) in ts.iter().enumerate() {
        let x0_hat = model.denoise(input, &x, t)?;
        let ratio = schedule.sigma(ts.get(k + 1).copied().unwrap_or(0)) / schedule.sigma(t);
        x = x0_hat.iter().zip(&x).map(|(h, xi)| h + (xi - h) * ratio).collect();
    }
    Ok(x)
}

/// Draws `n_samples` noise starts around the pocket center, refines each,
/// and returns all of them ranked best first. `Pose::score` holds the
/// ranking score.
pub fn predict<D: Denoiser>(
    model: &D,
    receptor: &Receptor,
    pocket: &Pocket,
    mol: &Molecule,
    cfg: &PredictConfig,
    rng_seed: u64,
) -> Result<Vec<Pose>> {
    if cfg.n_samples == 0 || cfg.refine_iters == 0 {
        return Err(Error::Config("n_samples and refine_iters must be at least 1".into()));
    }
    let input = ComplexInput::new(receptor, pocket, mol)?;
    let scorer = Scorer::new(receptor, pocket, mol);
    let ts = reverse_timesteps(cfg.schedule.steps(), cfg.refine_iters);
    let sigma_t = cfg.schedule.sigma(ts[0]);
    let mut poses = (0..cfg.n_samples)
        .into_par_iter()
        .map(|k| {
            let mut rng = child_rng(rng_seed, k as u64);
            let start = (0..input.n_ligand())
                .map(|_| input.center + standard_normal_vec3(&mut rng) * sigma_t)
                .collect();
            let coords = reverse_process(model, &input, &cfg.schedule, &ts, start)?;
            let mut pose = Pose::new(coords, Provenance::Predicted);
            let mut score = scorer.score(&pose).total;
            if cfg.ranking == Ranking::PhysicsScorePlusValidity {
                let failed = validity_check(receptor, pocket, mol, &pose).failed_checks().len();
                score += VALIDITY_PENALTY * failed as f64;
            }
            pose.score = if score.is_finite() { score } else { f64::INFINITY };
            Ok(pose)
        })
        .collect::<Result<Vec<_>>>()?;
    poses.sort_by(|a, b| a.score.total_cmp(&b.score));
    Ok(poses)
}
