use crate::geom::Vec3;
use crate::molio::{Pocket, Receptor};
use crate::rng::rng_from_seed;
use rand_distr::{Distribution, Normal};
use std::collections::HashSet;

/// No two receptor atoms may end up closer than this after displacement.
pub const APO_MIN_DISTANCE: f64 = 1.8;
const MAX_RETRIES: usize = 50;

/// Synthetic apo surrogate: Gaussian displacement (per-coordinate standard
/// deviation `magnitude`) of side-chain atoms in pocket-lining residues.
///
/// Each atom is resampled until it keeps `APO_MIN_DISTANCE` from every
/// other receptor atom, up to 50 retries; after that it stays at its
/// original position. Atoms that already sat closer than the limit in the
/// input (covalent partners) are exempt from the check against each other.
pub fn make_apo(receptor: &Receptor, pocket: &Pocket, magnitude: f64, rng_seed: u64) -> Receptor {
    let mut out = receptor.clone();
    if !(magnitude > 0.0 && magnitude.is_finite()) {
        return out;
    }
    let lining: HashSet<(char, i32)> = pocket
        .member_atoms
        .iter()
        .filter_map(|&i| receptor.atoms.get(i))
        .map(|a| (a.chain, a.residue_seq))
        .collect();
    let movable: Vec<usize> = receptor
        .atoms
        .iter()
        .enumerate()
        .filter(|(_, a)| !a.is_backbone() && lining.contains(&(a.chain, a.residue_seq)))
        .map(|(i, _)| i)
        .collect();
    let normal = Normal::new(0.0, magnitude).expect("positive std");
    let mut rng = rng_from_seed(rng_seed);
    let original: Vec<Vec3> = receptor.atoms.iter().map(|a| a.atom.position).collect();
    for &i in &movable {
        let exempt: Vec<usize> = original
            .iter()
            .enumerate()
            .filter(|&(j, p)| j != i && (p - original[i]).norm() < APO_MIN_DISTANCE)
            .map(|(j, _)| j)
            .collect();
        let mut placed = false;
        for _ in 0..MAX_RETRIES {
            let d = Vec3::new(
                normal.sample(&mut rng),
                normal.sample(&mut rng),
                normal.sample(&mut rng),
            );
            let candidate = original[i] + d;
            let clear = out.atoms.iter().enumerate().all(|(j, a)| {
                j == i || exempt.contains(&j) || (a.atom.position - candidate).norm() >= APO_MIN_DISTANCE
            });
            if clear {
                out.atoms[i].atom.position = candidate;
                placed = true;
                break;
            }
        }
        if !placed {
            out.atoms[i].atom.position = original[i];
        }
    }
    out
}
