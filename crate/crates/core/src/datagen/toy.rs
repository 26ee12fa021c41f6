//! Synthetic complexes with a planted binding pose.
//!
//! The ligand is grown from an optional aromatic ring with sp3 chain
//! geometry. The receptor is a two-layer cast around that conformation:
//! side-chain atoms sit at the Lennard-Jones minimum of the ligand surface
//! (polar partners at hydrogen-bond distance) and each is backed by a
//! backbone atom further out. The crystal pose is therefore a deep local
//! minimum of the docking score.

use crate::evalkit::{ideal_bond_length, validity_check};
use crate::geom::{self, Vec3};
use crate::minidock::{greedy_descent, Scorer, SearchConfig};
use crate::molio::{
    perceive_topology, Atom, Bond, BondOrder, Element, Molecule, Pocket, Pose, Provenance, Receptor, ReceptorAtom,
};
use crate::rng::{child_rng, derive_seed, Rng};
use crate::{Error, Result};
use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

const TETRAHEDRAL: f64 = 109.47_f64;
const AROMATIC_RADIUS: f64 = 1.40;
const HBOND_PARTNER_DISTANCE: f64 = 2.9;
const RECEPTOR_SPACING: f64 = 3.0;
const BACKING_OFFSET: f64 = 3.4;
/// Minimum distance for intra-ligand heavy pairs three or more bonds apart.
const LIGAND_NONBONDED_MIN: f64 = 3.0;
const MAX_ATTEMPTS: usize = 100;
/// Drug-like flexibility limit for generated ligands.
pub const TOY_MAX_ROTATABLE: usize = 5;

pub const TOY_MIN_ATOMS: usize = 6;
pub const TOY_MAX_ATOMS: usize = 16;

const AMINO: &[u8] = b"ACDEFGHIKLMNPQRSTVWY";

/// Sequence template shared by related toy receptors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyTemplate {
    pub label: String,
    pub sequence: String,
}

impl FamilyTemplate {
    pub fn random(label: impl Into<String>, len: usize, rng: &mut Rng) -> Self {
        let sequence = (0..len)
            .map(|_| AMINO[rng.random_range(0..AMINO.len())] as char)
            .collect();
        Self {
            label: label.into(),
            sequence,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToyComplex {
    pub receptor: Receptor,
    pub pocket: Pocket,
    pub molecule: Molecule,
    pub crystal: Pose,
}

struct Builder {
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    aromatic: Vec<bool>,
}

impl Builder {
    fn neighbors(&self, i: usize) -> Vec<usize> {
        self.bonds
            .iter()
            .filter(|b| b.a == i || b.b == i)
            .map(|b| b.other(i))
            .collect()
    }

    fn heavy_degree(&self, i: usize) -> usize {
        self.neighbors(i)
            .into_iter()
            .filter(|&j| self.atoms[j].is_heavy())
            .count()
    }

    fn max_heavy_degree(&self, i: usize) -> usize {
        if self.aromatic[i] {
            return if self.atoms[i].element == Element::C { 3 } else { 2 };
        }
        let has_double = self
            .bonds
            .iter()
            .any(|b| (b.a == i || b.b == i) && b.order != BondOrder::Single);
        match self.atoms[i].element {
            Element::C if has_double => 3,
            Element::C => 4,
            Element::N => 3,
            Element::O | Element::S => 2,
            _ => 1,
        }
    }

    fn topological_distances(&self, src: usize) -> Vec<usize> {
        let n = self.atoms.len();
        let mut dist = vec![usize::MAX; n];
        dist[src] = 0;
        let mut queue = std::collections::VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            for v in self.neighbors(u) {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// True when `pos`, bonded to `parent`, keeps clear of existing heavy
    /// atoms.
    fn placement_clear(&self, pos: &Vec3, parent: usize) -> bool {
        let dist = self.topological_distances(parent);
        self.atoms.iter().enumerate().all(|(k, a)| {
            if !a.is_heavy() || k == parent {
                return true;
            }
            let path = dist[k].saturating_add(1);
            let d = (a.position - pos).norm();
            if path >= 3 {
                d >= LIGAND_NONBONDED_MIN
            } else {
                d >= 2.2
            }
        })
    }

    /// Candidate bond directions from `parent` following ideal geometry.
    fn candidate_directions(&self, parent: usize, rng: &mut Rng) -> Vec<Vec3> {
        let p = self.atoms[parent].position;
        let nbrs = self.neighbors(parent);
        let units: Vec<Vec3> = nbrs.iter().map(|&j| (self.atoms[j].position - p).normalize()).collect();
        if self.aromatic[parent] {
            let ring: Vec<usize> = nbrs.iter().copied().filter(|&j| self.aromatic[j]).collect();
            if ring.len() == 2 {
                let out = -(units[nbrs.iter().position(|&j| j == ring[0]).unwrap()]
                    + units[nbrs.iter().position(|&j| j == ring[1]).unwrap()]);
                return vec![out.normalize()];
            }
        }
        let theta = TETRAHEDRAL.to_radians();
        match units.len() {
            0 => vec![geom::random_unit_vector(rng)],
            1 => {
                let u = units[0];
                let q = nbrs[0];
                // Reference for the dihedral: another neighbour of q.
                let reference = self
                    .neighbors(q)
                    .into_iter()
                    .find(|&r| r != parent)
                    .map(|r| self.atoms[r].position - self.atoms[q].position);
                let w0 = match reference {
                    Some(r) => {
                        let perp = r - u * r.dot(&u);
                        if perp.norm() > 1e-6 {
                            perp.normalize()
                        } else {
                            any_perpendicular(&u)
                        }
                    }
                    None => any_perpendicular(&u),
                };
                let mut dihedrals = vec![180.0, 60.0, -60.0, 90.0, -90.0, 120.0, -120.0];
                dihedrals[1..].shuffle(rng);
                dihedrals
                    .into_iter()
                    .map(|phi: f64| {
                        let w = geom::rotate_about_axis(&w0, &Vec3::zeros(), &u, phi.to_radians());
                        (u * theta.cos() + w * theta.sin()).normalize()
                    })
                    .collect()
            }
            2 => {
                let bis = -(units[0] + units[1]).normalize();
                let n = units[0].cross(&units[1]).normalize();
                // Tetrahedral completion: tilt half the tetrahedral angle out
                // of the plane of the two existing bonds.
                let half = theta / 2.0;
                let mut out = vec![
                    (bis * half.cos() + n * half.sin()).normalize(),
                    (bis * half.cos() - n * half.sin()).normalize(),
                ];
                out.shuffle(rng);
                out
            }
            3 => vec![-(units[0] + units[1] + units[2]).normalize()],
            _ => Vec::new(),
        }
    }

    fn add_atom(&mut self, element: Element, pos: Vec3, parent: Option<usize>, order: BondOrder) -> usize {
        self.atoms.push(Atom::new(element, pos));
        self.aromatic.push(false);
        let idx = self.atoms.len() - 1;
        if let Some(p) = parent {
            self.bonds.push(Bond { a: p, b: idx, order });
        }
        idx
    }

    fn add_ring(&mut self, rng: &mut Rng, attach: Option<(usize, Vec3)>) -> Option<()> {
        let n_ring = if rng.random_bool(0.3) { 1 } else { 0 };
        let (center, e1, e2, start) = match attach {
            None => {
                let rot = geom::random_rotation(rng);
                (Vec3::zeros(), rot * Vec3::x(), rot * Vec3::y(), None)
            }
            Some((parent, dir)) => {
                let len = ideal_bond_length(self.atoms[parent].element, Element::C, BondOrder::Single);
                let p = self.atoms[parent].position;
                let center = p + dir * (len + AROMATIC_RADIUS);
                let e2 = geom::rotate_about_axis(
                    &any_perpendicular(&dir),
                    &Vec3::zeros(),
                    &dir,
                    rng.random_range(0.0..std::f64::consts::PI),
                );
                (center, -dir, e2, Some(parent))
            }
        };
        let mut positions = Vec::new();
        for k in 0..6 {
            let t = k as f64 * std::f64::consts::PI / 3.0;
            positions.push(center + (e1 * t.cos() + e2 * t.sin()) * AROMATIC_RADIUS);
        }
        if let Some(parent) = start {
            for (k, pos) in positions.iter().enumerate() {
                let ok = self.atoms.iter().enumerate().all(|(j, a)| {
                    if !a.is_heavy() || j == parent {
                        return true;
                    }
                    let min = if k == 0 { 2.2 } else { LIGAND_NONBONDED_MIN };
                    (a.position - pos).norm() >= min
                });
                if !ok {
                    return None;
                }
            }
        }
        let first = self.atoms.len();
        for (k, pos) in positions.into_iter().enumerate() {
            // Ring nitrogen never sits at the attachment atom.
            let element = if n_ring == 1 && k == 3 { Element::N } else { Element::C };
            self.atoms.push(Atom::new(element, pos));
            self.aromatic.push(true);
        }
        for k in 0..6 {
            self.bonds.push(Bond {
                a: first + k,
                b: first + (k + 1) % 6,
                order: BondOrder::Aromatic,
            });
        }
        if let Some(parent) = start {
            self.bonds.push(Bond {
                a: parent,
                b: first,
                order: BondOrder::Single,
            });
        }
        Some(())
    }
}

fn any_perpendicular(u: &Vec3) -> Vec3 {
    let trial = if u.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    (trial - u * trial.dot(u)).normalize()
}

fn pick_element(rng: &mut Rng) -> Element {
    let r: f64 = rng.random();
    match r {
        r if r < 0.58 => Element::C,
        r if r < 0.74 => Element::N,
        r if r < 0.90 => Element::O,
        r if r < 0.94 => Element::S,
        r if r < 0.97 => Element::F,
        _ => Element::Cl,
    }
}

/// Grows a ligand with `n_heavy` heavy atoms and polar hydrogens.
fn build_ligand(n_heavy: usize, rng: &mut Rng) -> Option<Molecule> {
    let mut b = Builder {
        atoms: Vec::new(),
        bonds: Vec::new(),
        aromatic: Vec::new(),
    };
    let n_rings_target = if n_heavy >= 12 && rng.random_bool(0.6) {
        2
    } else if n_heavy >= 7 && rng.random_bool(0.85) {
        1
    } else {
        0
    };
    let mut rings_built = 0;
    if n_rings_target > 0 {
        b.add_ring(rng, None)?;
        rings_built = 1;
    } else {
        b.add_atom(Element::C, Vec3::zeros(), None, BondOrder::Single);
    }
    let mut stalls = 0;
    while b.atoms.len() < n_heavy {
        if stalls > 60 {
            return None;
        }
        let remaining = n_heavy - b.atoms.len();
        let parents: Vec<usize> = (0..b.atoms.len())
            .filter(|&i| b.heavy_degree(i) < b.max_heavy_degree(i))
            .collect();
        if parents.is_empty() {
            return None;
        }
        let parent = parents[rng.random_range(0..parents.len())];
        let dirs = b.candidate_directions(parent, rng);
        let want_ring = rings_built < n_rings_target && remaining >= 6 && !b.aromatic[parent];
        if want_ring {
            let mut placed = false;
            for dir in &dirs {
                if b.add_ring(rng, Some((parent, *dir))).is_some() {
                    placed = true;
                    rings_built += 1;
                    break;
                }
            }
            if !placed {
                stalls += 1;
            }
            continue;
        }
        let mut element = pick_element(rng);
        if b.aromatic[parent] && b.atoms[parent].element == Element::N {
            stalls += 1;
            continue;
        }
        // Keep heteroatoms from chaining into peroxides, N-O and S-S bonds.
        if b.atoms[parent].element != Element::C && element != Element::C {
            element = Element::C;
        }
        let terminal_only = matches!(element, Element::F | Element::Cl);
        if terminal_only && remaining > 1 && rng.random_bool(0.5) {
            element = Element::C;
        }
        let carbonyl = element == Element::O
            && b.atoms[parent].element == Element::C
            && !b.aromatic[parent]
            && b.heavy_degree(parent) <= 2
            && !b
                .bonds
                .iter()
                .any(|x| (x.a == parent || x.b == parent) && x.order != BondOrder::Single)
            && rng.random_bool(0.3);
        let order = if carbonyl { BondOrder::Double } else { BondOrder::Single };
        let len = ideal_bond_length(b.atoms[parent].element, element, order);
        let mut placed = false;
        for dir in dirs {
            let pos = b.atoms[parent].position + dir * len;
            if b.placement_clear(&pos, parent) {
                b.add_atom(element, pos, Some(parent), order);
                placed = true;
                break;
            }
        }
        if !placed {
            stalls += 1;
        }
    }
    if b.atoms.len() != n_heavy || rings_built != n_rings_target {
        return None;
    }
    // Occasionally protonate a terminal amine.
    let mut charged = None;
    for i in 0..b.atoms.len() {
        if b.atoms[i].element == Element::N && !b.aromatic[i] && b.heavy_degree(i) == 1 && rng.random_bool(0.5) {
            charged = Some(i);
            break;
        }
    }
    // Polar hydrogens on sp3 N/O.
    let heavy_n = b.atoms.len();
    for i in 0..heavy_n {
        let el = b.atoms[i].element;
        if !el.is_polar() || b.aromatic[i] {
            continue;
        }
        if b.bonds
            .iter()
            .any(|x| (x.a == i || x.b == i) && x.order != BondOrder::Single)
        {
            continue;
        }
        let valence = match el {
            Element::O => 2,
            _ if charged == Some(i) => 4,
            _ => 3,
        };
        let n_h = valence - b.heavy_degree(i);
        for _ in 0..n_h {
            let dirs = b.candidate_directions(i, rng);
            let Some(dir) = dirs.first() else { break };
            let pos = b.atoms[i].position + dir * 1.0;
            b.add_atom(Element::H, pos, Some(i), BondOrder::Single);
        }
        if charged == Some(i) {
            b.atoms[i].formal_charge = 1;
        }
    }
    let mut mol = Molecule {
        name: String::new(),
        atoms: b.atoms,
        bonds: b.bonds,
        rings: Vec::new(),
        rotatable_bonds: Vec::new(),
    };
    mol.assign_hbond_roles();
    perceive_topology(&mol)
        .ok()
        .filter(|m| m.rotatable_bonds.len() <= TOY_MAX_ROTATABLE)
}

struct SiteCandidate {
    pos: Vec3,
    element: Element,
    outward: Vec3,
    polar_for: Option<usize>,
    charge: i32,
}

fn build_receptor(mol: &Molecule, template: &FamilyTemplate, rng: &mut Rng) -> Option<Receptor> {
    let heavy: Vec<&Atom> = mol.heavy_atoms();
    let xs: Vec<Vec3> = heavy.iter().map(|a| a.position).collect();
    let dirs = geom::fibonacci_sphere(64);
    let rot = geom::random_rotation(rng);

    let clear_of_ligand = |p: &Vec3, skip: Option<usize>, el: Element| -> bool {
        xs.iter()
            .enumerate()
            .all(|(k, x)| Some(k) == skip || (x - p).norm() >= 0.98 * (heavy[k].element.vdw_radius() + el.vdw_radius()))
    };

    let mut polar: Vec<SiteCandidate> = Vec::new();
    let mut apolar: Vec<SiteCandidate> = Vec::new();
    for (i, atom) in heavy.iter().enumerate() {
        let offset: Vec<Vec3> = dirs.iter().map(|d| rot * d).collect();
        if atom.is_hbond_donor || atom.is_hbond_acceptor {
            let mut options: Vec<Vec3> = offset
                .iter()
                .map(|d| xs[i] + d * HBOND_PARTNER_DISTANCE)
                .filter(|p| clear_of_ligand(p, Some(i), Element::O))
                .collect();
            options.shuffle(rng);
            if let Some(p) = options.first() {
                let charge = if atom.formal_charge > 0 { -1 } else { 0 };
                polar.push(SiteCandidate {
                    pos: *p,
                    element: Element::O,
                    outward: (p - xs[i]).normalize(),
                    polar_for: Some(i),
                    charge,
                });
            }
        }
        for d in &offset {
            let p = xs[i] + d * (atom.element.vdw_radius() + Element::C.vdw_radius());
            if clear_of_ligand(&p, None, Element::C) {
                apolar.push(SiteCandidate {
                    pos: p,
                    element: Element::C,
                    outward: *d,
                    polar_for: None,
                    charge: 0,
                });
            }
        }
    }
    apolar.shuffle(rng);

    let mut chosen: Vec<SiteCandidate> = Vec::new();
    for cand in polar.into_iter().chain(apolar) {
        if chosen.iter().all(|c| (c.pos - cand.pos).norm() >= RECEPTOR_SPACING) {
            chosen.push(cand);
        }
    }
    if chosen.len() < 8 {
        return None;
    }

    let mut atoms: Vec<ReceptorAtom> = Vec::new();
    let mut occupied: Vec<Vec3> = chosen.iter().map(|c| c.pos).collect();
    let seq: Vec<char> = template.sequence.chars().collect();
    let mut serial = 1;
    for (r, site) in chosen.iter().enumerate() {
        let residue_seq = r as i32 + 1;
        let (residue_name, side_name) = match (site.polar_for, site.charge) {
            (Some(_), c) if c < 0 => ("ASP", "OD1"),
            (Some(_), _) => ("SER", "OG"),
            _ => {
                let code = seq.get(r % seq.len().max(1)).copied().unwrap_or('A');
                let code = if matches!(code, 'S' | 'D' | 'G') { 'A' } else { code };
                (crate::molio::receptor_residue_name(code), "CB")
            }
        };
        let backing = site.pos + site.outward * BACKING_OFFSET;
        let backing_ok = occupied
            .iter()
            .all(|p| (p - backing).norm() >= RECEPTOR_SPACING - 1e-9 || *p == site.pos)
            && clear_of_ligand(&backing, None, Element::C);
        if backing_ok {
            atoms.push(ReceptorAtom {
                atom: Atom::new(Element::C, backing),
                serial,
                name: "CA".into(),
                residue_name: residue_name.into(),
                chain: 'A',
                residue_seq,
            });
            serial += 1;
            occupied.push(backing);
        }
        let mut atom = Atom::new(site.element, site.pos);
        atom.formal_charge = site.charge;
        atoms.push(ReceptorAtom {
            atom,
            serial,
            name: side_name.into(),
            residue_name: residue_name.into(),
            chain: 'A',
            residue_seq,
        });
        serial += 1;
    }
    for a in atoms.iter_mut() {
        let polar = a.atom.element.is_polar();
        a.atom.is_hbond_acceptor = polar;
        a.atom.is_hbond_donor = polar && a.name == "OG";
    }
    let mut receptor = Receptor {
        name: String::new(),
        atoms,
        sequences: Vec::new(),
        pockets: Vec::new(),
        family_label: Some(template.label.clone()),
    };
    receptor.rebuild_sequences();
    Some(receptor)
}

/// Settles the constructed pose into the nearest local minimum of the
/// score with progressively finer greedy moves.
fn relax(receptor: &Receptor, pocket: &Pocket, mol: &Molecule, pose: Pose, seed: u64) -> Pose {
    let base = SearchConfig::default();
    let scorer = Scorer::new(receptor, pocket, mol);
    let mut pose = pose;
    pose.score = scorer.score(&pose).total;
    for round in 0..8u64 {
        let before = pose.score;
        for (k, scale) in [1.0, 0.25, 0.05, 0.01].into_iter().enumerate() {
            let cfg = SearchConfig {
                translation_step: base.translation_step * scale,
                rotation_step: base.rotation_step * scale,
                torsion_step: base.torsion_step * scale,
                rng_seed: derive_seed(seed, round * 4 + k as u64),
                ..base.clone()
            };
            pose = greedy_descent(receptor, pocket, mol, &pose, &cfg, 1500);
        }
        if before - pose.score < 1e-3 {
            break;
        }
    }
    pose
}

/// Builds a synthetic complex whose crystal pose is a planted minimum of
/// the docking score. Deterministic in `rng_seed`.
pub fn gen_toy_complex(rng_seed: u64, n_ligand_atoms: usize) -> Result<ToyComplex> {
    let mut rng = child_rng(rng_seed, 0x7e57);
    let template = FamilyTemplate::random(format!("fam{rng_seed}"), 120, &mut rng);
    gen_toy_complex_in_family(rng_seed, n_ligand_atoms, &template, 0.0)
}

/// As [`gen_toy_complex`], with residue names drawn from `template`
/// mutated at rate `mutation`.
pub fn gen_toy_complex_in_family(
    rng_seed: u64,
    n_ligand_atoms: usize,
    template: &FamilyTemplate,
    mutation: f64,
) -> Result<ToyComplex> {
    if !(TOY_MIN_ATOMS..=TOY_MAX_ATOMS).contains(&n_ligand_atoms) {
        return Err(Error::Config(format!(
            "toy ligands need {TOY_MIN_ATOMS}..={TOY_MAX_ATOMS} heavy atoms, got {n_ligand_atoms}"
        )));
    }
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = child_rng(rng_seed, attempt as u64);
        let mutated = FamilyTemplate {
            label: template.label.clone(),
            sequence: template
                .sequence
                .chars()
                .map(|c| {
                    if rng.random_bool(mutation.clamp(0.0, 1.0)) {
                        AMINO[rng.random_range(0..AMINO.len())] as char
                    } else {
                        c
                    }
                })
                .collect(),
        };
        let Some(mut mol) = build_ligand(n_ligand_atoms, &mut rng) else {
            continue;
        };
        // Place the crystal somewhere away from the origin.
        let shift = Vec3::new(
            rng.random_range(-20.0..20.0),
            rng.random_range(-20.0..20.0),
            rng.random_range(-20.0..20.0),
        );
        for a in mol.atoms.iter_mut() {
            a.position += shift;
        }
        mol.name = format!("toy_lig_{rng_seed}");
        let Some(mut receptor) = build_receptor(&mol, &mutated, &mut rng) else {
            continue;
        };
        receptor.name = format!("toy_rec_{rng_seed}");
        let crystal_coords = mol.heavy_positions();
        let center = geom::centroid(&crystal_coords);
        let reach = crystal_coords.iter().map(|p| (p - center).norm()).fold(0.0, f64::max);
        let buried = super::pockets::buriedness_at(&receptor, &center);
        let pocket = Pocket::around(&receptor, center, reach + 2.0, buried);
        receptor.pockets = vec![pocket.clone()];
        let crystal = relax(
            &receptor,
            &pocket,
            &mol,
            Pose::new(crystal_coords, Provenance::Crystal),
            rng_seed,
        );
        let mol = mol.with_heavy_coordinates(&crystal.coordinates)?;
        if !validity_check(&receptor, &pocket, &mol, &crystal).pb_valid {
            continue;
        }
        return Ok(ToyComplex {
            receptor,
            pocket,
            molecule: mol,
            crystal,
        });
    }
    Err(Error::Generation(format!(
        "no valid toy complex for seed {rng_seed} after {MAX_ATTEMPTS} attempts"
    )))
}

/// A family-structured collection of toy complexes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToyWorld {
    pub seed: u64,
    pub complexes: Vec<ToyComplex>,
}

/// Generates `n` complexes spread over `ceil(n / 4)` sequence families,
/// with ligand sizes drawn uniformly from the supported range.
pub fn gen_toy_world(n: usize, seed: u64) -> Result<ToyWorld> {
    use rayon::prelude::*;
    let n_families = n.div_ceil(4).max(1);
    let mut rng = child_rng(seed, 0xfa);
    let families: Vec<FamilyTemplate> = (0..n_families)
        .map(|f| FamilyTemplate::random(format!("family_{f:02}"), 120, &mut rng))
        .collect();
    let specs: Vec<(u64, usize, usize)> = (0..n)
        .map(|i| {
            let mut r = child_rng(seed, 1000 + i as u64);
            let size = r.random_range(TOY_MIN_ATOMS..=TOY_MAX_ATOMS);
            let family = r.random_range(0..n_families);
            (crate::rng::derive_seed(seed, i as u64), size, family)
        })
        .collect();
    let complexes = specs
        .par_iter()
        .enumerate()
        .map(|(i, &(s, size, family))| {
            let mut c = gen_toy_complex_in_family(s, size, &families[family], 0.1)?;
            c.receptor.name = format!("rec_{i:04}");
            c.molecule.name = format!("lig_{i:04}");
            Ok(c)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ToyWorld { seed, complexes })
}
