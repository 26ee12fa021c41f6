use super::score::Scorer;
use crate::evalkit::rmsd;
use crate::geom::{self, Vec3};
use crate::molio::{HeavyGraph, Molecule, Pocket, Pose, Provenance, Receptor};
use crate::rng::{child_rng, Rng};
use crate::{Error, Result};
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    pub n_restarts: usize,
    pub n_steps: usize,
    pub temperature_start: f64,
    pub temperature_end: f64,
    /// Å
    pub translation_step: f64,
    /// radians
    pub rotation_step: f64,
    /// radians
    pub torsion_step: f64,
    pub top_k: usize,
    pub rng_seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            n_restarts: 64,
            n_steps: 2000,
            temperature_start: 1.2,
            temperature_end: 0.02,
            translation_step: 0.6,
            rotation_step: 0.3,
            torsion_step: 0.5,
            top_k: 1,
            rng_seed: 0,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_restarts == 0 || self.n_steps == 0 || self.top_k == 0 {
            return Err(Error::Config("search counts must be >= 1".into()));
        }
        if !(self.temperature_end > 0.0 && self.temperature_start >= self.temperature_end) {
            return Err(Error::Config("temperatures must satisfy start >= end > 0".into()));
        }
        let steps = [self.translation_step, self.rotation_step, self.torsion_step];
        if steps.iter().any(|s| !s.is_finite() || *s < 0.0) {
            return Err(Error::Config("step sizes must be finite and >= 0".into()));
        }
        Ok(())
    }

    fn temperature(&self, step: usize) -> f64 {
        if self.n_steps <= 1 {
            return self.temperature_end;
        }
        let f = step as f64 / (self.n_steps - 1) as f64;
        self.temperature_start * (self.temperature_end / self.temperature_start).powf(f)
    }
}

#[derive(Debug, Clone)]
struct Torsion {
    axis_from: usize,
    axis_to: usize,
    /// Heavy-atom nodes rotated by this torsion (the smaller fragment).
    moving: Vec<usize>,
}

/// Torsional degrees of freedom of a ligand in heavy-atom index space.
#[derive(Debug, Clone)]
pub struct Conformer {
    torsions: Vec<Torsion>,
}

impl Conformer {
    pub fn new(mol: &Molecule) -> Self {
        let graph = HeavyGraph::new(mol);
        let mut torsions = Vec::new();
        for &bi in &mol.rotatable_bonds {
            let Some(&(u, v, _, _)) = graph.edges.iter().find(|e| e.3 == bi) else {
                continue;
            };
            let Some(side_v) = graph.side_of(u, v) else {
                continue;
            };
            let n = graph.len();
            if side_v.len() * 2 <= n {
                torsions.push(Torsion {
                    axis_from: u,
                    axis_to: v,
                    moving: side_v,
                });
            } else {
                let side_u = graph.side_of(v, u).expect("bridge from both ends");
                torsions.push(Torsion {
                    axis_from: v,
                    axis_to: u,
                    moving: side_u,
                });
            }
        }
        Self { torsions }
    }

    pub fn n_torsions(&self) -> usize {
        self.torsions.len()
    }

    /// Rotates the moving fragment of torsion `k` by `angle`.
    pub fn twist(&self, coords: &mut [Vec3], k: usize, angle: f64) {
        let t = &self.torsions[k];
        let origin = coords[t.axis_to];
        let axis = coords[t.axis_to] - coords[t.axis_from];
        if axis.norm() == 0.0 {
            return;
        }
        let rot = nalgebra::Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(axis), angle);
        for &i in &t.moving {
            if i != t.axis_to {
                coords[i] = origin + rot * (coords[i] - origin);
            }
        }
    }

    /// Moving fragment of torsion `k` (test and diagnostics helper).
    pub fn moving_atoms(&self, k: usize) -> &[usize] {
        &self.torsions[k].moving
    }

    fn perturb_with<R: rand::Rng + ?Sized>(
        &self,
        coords: &mut [Vec3],
        translation_step: f64,
        rotation_step: f64,
        torsion_step: f64,
        rng: &mut R,
    ) {
        if translation_step > 0.0 {
            let shift = geom::random_in_ball(rng, translation_step);
            for c in coords.iter_mut() {
                *c += shift;
            }
        }
        if rotation_step > 0.0 {
            let axis = geom::random_unit_vector(rng);
            let angle = rng.random_range(-rotation_step..=rotation_step);
            let rot = nalgebra::Rotation3::from_axis_angle(&nalgebra::Unit::new_unchecked(axis), angle);
            let c0 = geom::centroid(coords);
            for c in coords.iter_mut() {
                *c = c0 + rot * (*c - c0);
            }
        }
        if torsion_step > 0.0 && !self.torsions.is_empty() {
            let k = rng.random_range(0..self.torsions.len());
            let angle = rng.random_range(-torsion_step..=torsion_step);
            self.twist(coords, k, angle);
        }
    }
}

/// Applies one random rigid translation, one rotation about the centroid
/// and one torsion twist of the smaller fragment.
pub fn perturb(pose: &Pose, mol: &Molecule, cfg: &SearchConfig, rng: &mut Rng) -> Pose {
    let conf = Conformer::new(mol);
    let mut out = pose.clone();
    conf.perturb_with(
        &mut out.coordinates,
        cfg.translation_step,
        cfg.rotation_step,
        cfg.torsion_step,
        rng,
    );
    out
}

fn ligand_extent(coords: &[Vec3]) -> f64 {
    let mut best: f64 = 0.0;
    for i in 0..coords.len() {
        for j in i + 1..coords.len() {
            best = best.max((coords[i] - coords[j]).norm());
        }
    }
    best
}

/// Step-size multipliers of the greedy passes that finish each chain.
const POLISH_SCALES: [f64; 2] = [0.25, 0.05];

struct Chain {
    coords: Vec<Vec3>,
    score: f64,
}

fn anneal(scorer: &Scorer, conf: &Conformer, start: Vec<Vec3>, cfg: &SearchConfig, rng: &mut Rng) -> Chain {
    let mut current = start;
    let mut current_score = scorer.score_coords(&current).total;
    let mut best = Chain {
        coords: current.clone(),
        score: current_score,
    };
    let mut trial = current.clone();
    for step in 0..cfg.n_steps {
        let temperature = cfg.temperature(step);
        trial.copy_from_slice(&current);
        conf.perturb_with(
            &mut trial,
            cfg.translation_step,
            cfg.rotation_step,
            cfg.torsion_step,
            rng,
        );
        let s = scorer.score_coords(&trial).total;
        let delta = s - current_score;
        let u: f64 = rng.random();
        if delta <= 0.0 || u < (-delta / temperature).exp() {
            std::mem::swap(&mut current, &mut trial);
            current_score = s;
            if s < best.score {
                best.score = s;
                best.coords.copy_from_slice(&current);
            }
        }
    }
    best
}

fn descend(scorer: &Scorer, conf: &Conformer, chain: Chain, steps: usize, cfg: &SearchConfig, rng: &mut Rng) -> Chain {
    let mut best = chain;
    let mut trial = best.coords.clone();
    for _ in 0..steps {
        trial.copy_from_slice(&best.coords);
        conf.perturb_with(
            &mut trial,
            cfg.translation_step,
            cfg.rotation_step,
            cfg.torsion_step,
            rng,
        );
        let s = scorer.score_coords(&trial).total;
        if s < best.score {
            best.score = s;
            best.coords.copy_from_slice(&trial);
        }
    }
    best
}

/// Greedy local descent: accepts only improving perturbations.
pub fn greedy_descent(
    receptor: &Receptor,
    pocket: &Pocket,
    mol: &Molecule,
    pose: &Pose,
    cfg: &SearchConfig,
    steps: usize,
) -> Pose {
    let scorer = Scorer::new(receptor, pocket, mol);
    let conf = Conformer::new(mol);
    let mut rng = child_rng(cfg.rng_seed, u64::MAX);
    let start = Chain {
        score: scorer.score_coords(&pose.coordinates).total,
        coords: pose.coordinates.clone(),
    };
    let done = descend(&scorer, &conf, start, steps, cfg, &mut rng);
    Pose {
        coordinates: done.coords,
        score: done.score,
        provenance: pose.provenance,
    }
}

/// Runs `n_restarts` annealing chains from random placements inside the
/// pocket and returns up to `top_k` distinct poses, best first.
pub fn dock(receptor: &Receptor, pocket: &Pocket, mol: &Molecule, cfg: &SearchConfig) -> Result<Vec<Pose>> {
    cfg.validate()?;
    let template = mol.heavy_positions();
    if template.is_empty() {
        return Err(Error::Contract(format!("'{}' has no heavy atoms", mol.name)));
    }
    let extent = ligand_extent(&template);
    if extent > 2.0 * pocket.radius {
        return Err(Error::DockingInfeasible(format!(
            "ligand '{}' spans {extent:.2} Å, pocket diameter is {:.2} Å",
            mol.name,
            2.0 * pocket.radius
        )));
    }
    let scorer = Scorer::new(receptor, pocket, mol);
    let conf = Conformer::new(mol);
    let c0 = geom::centroid(&template);
    let lig_radius = template.iter().map(|p| (p - c0).norm()).fold(0.0, f64::max);
    let placement_radius = (pocket.radius - lig_radius).max(0.5);
    let polish: Vec<SearchConfig> = POLISH_SCALES
        .iter()
        .map(|&f| SearchConfig {
            translation_step: cfg.translation_step * f,
            rotation_step: cfg.rotation_step * f,
            torsion_step: cfg.torsion_step * f,
            ..cfg.clone()
        })
        .collect();

    let mut chains: Vec<(usize, Chain)> = (0..cfg.n_restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = child_rng(cfg.rng_seed, r as u64);
            let rot = geom::random_rotation(&mut rng);
            let mut coords: Vec<Vec3> = template.iter().map(|p| rot * (p - c0)).collect();
            for k in 0..conf.n_torsions() {
                let angle = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
                conf.twist(&mut coords, k, angle);
            }
            let c1 = geom::centroid(&coords);
            let shift = pocket.center + geom::random_in_ball(&mut rng, placement_radius) - c1;
            for c in coords.iter_mut() {
                *c += shift;
            }
            let chain = anneal(&scorer, &conf, coords, cfg, &mut rng);
            let chain = polish
                .iter()
                .fold(chain, |c, p| descend(&scorer, &conf, c, cfg.n_steps / 4, p, &mut rng));
            (r, chain)
        })
        .collect();
    chains.sort_by(|a, b| a.1.score.total_cmp(&b.1.score).then(a.0.cmp(&b.0)));

    let mut kept: Vec<Pose> = Vec::new();
    for (_, chain) in chains {
        if kept.len() == cfg.top_k {
            break;
        }
        let pose = Pose {
            coordinates: chain.coords,
            score: chain.score,
            provenance: Provenance::Generated,
        };
        let distinct = kept.iter().all(|k| rmsd(k, &pose).map(|d| d >= 0.5).unwrap_or(true));
        if distinct {
            kept.push(pose);
        }
    }
    Ok(kept)
}
