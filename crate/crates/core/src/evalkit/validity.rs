//! Physical plausibility checks on a ligand pose.

use crate::geom::{self, Vec3};
use crate::molio::{BondOrder, Element, HeavyGraph, Molecule, Pocket, Pose, Receptor};
use serde::{Deserialize, Serialize};

/// Relative tolerance for bond lengths and angles.
pub const GEOMETRY_TOLERANCE: f64 = 0.25;
/// Clash threshold as a fraction of summed van der Waals radii.
pub const CLASH_FRACTION: f64 = 0.8;
/// Maximum out-of-plane deviation for aromatic ring atoms, Å.
pub const PLANARITY_TOLERANCE: f64 = 0.25;
/// Minimum topological distance for intra-ligand clash pairs.
pub const CLASH_MIN_PATH: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub bond_lengths: bool,
    pub bond_angles: bool,
    pub internal_clash: bool,
    pub protein_ligand_clash: bool,
    pub in_pocket: bool,
    pub flat_aromatic_rings: bool,
    pub pb_valid: bool,
}

impl ValidityReport {
    pub fn failed_checks(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        for (ok, name) in [
            (self.bond_lengths, "bond_lengths"),
            (self.bond_angles, "bond_angles"),
            (self.internal_clash, "internal_clash"),
            (self.protein_ligand_clash, "protein_ligand_clash"),
            (self.in_pocket, "in_pocket"),
            (self.flat_aromatic_rings, "flat_aromatic_rings"),
        ] {
            if !ok {
                out.push(name);
            }
        }
        out
    }

    pub fn n_failed(&self) -> usize {
        self.failed_checks().len()
    }
}

pub fn ideal_bond_length(a: Element, b: Element, order: BondOrder) -> f64 {
    let shrink = match order {
        BondOrder::Single => 0.0,
        BondOrder::Aromatic => 0.12,
        BondOrder::Double => 0.20,
        BondOrder::Triple => 0.34,
    };
    a.covalent_radius() + b.covalent_radius() - shrink
}

/// Ideal bond angle (degrees) at a heavy node from its bond orders: linear
/// for a triple bond or two double bonds, trigonal for any double or
/// aromatic bond, tetrahedral otherwise.
pub fn ideal_angle(orders: &[BondOrder]) -> f64 {
    let triples = orders.iter().filter(|o| **o == BondOrder::Triple).count();
    let doubles = orders.iter().filter(|o| **o == BondOrder::Double).count();
    let aromatic = orders.contains(&BondOrder::Aromatic);
    if triples > 0 || doubles >= 2 {
        180.0
    } else if doubles == 1 || aromatic {
        120.0
    } else {
        109.5
    }
}

fn within(value: f64, ideal: f64) -> bool {
    (value - ideal).abs() <= GEOMETRY_TOLERANCE * ideal
}

pub fn validity_check(receptor: &Receptor, pocket: &Pocket, mol: &Molecule, pose: &Pose) -> ValidityReport {
    let graph = HeavyGraph::new(mol);
    let x = &pose.coordinates;
    let el: Vec<Element> = graph.atom_index.iter().map(|&i| mol.atoms[i].element).collect();
    let n = graph.len().min(x.len());

    let bond_lengths = graph
        .edges
        .iter()
        .all(|&(u, v, order, _)| within((x[u] - x[v]).norm(), ideal_bond_length(el[u], el[v], order)));

    let bond_angles = (0..n).all(|c| {
        let nbrs: Vec<(usize, usize)> = graph.adjacency[c].clone();
        if nbrs.len() < 2 {
            return true;
        }
        let orders: Vec<BondOrder> = nbrs.iter().map(|&(_, bi)| mol.bonds[bi].order).collect();
        let ideal = ideal_angle(&orders);
        for a in 0..nbrs.len() {
            for b in a + 1..nbrs.len() {
                let angle = geom::bond_angle(&x[nbrs[a].0], &x[c], &x[nbrs[b].0]).to_degrees();
                if !within(angle, ideal) {
                    return false;
                }
            }
        }
        true
    });

    let paths = graph.path_distances();
    let mut internal_clash = true;
    'outer: for i in 0..n {
        for j in i + 1..n {
            if paths[i][j] < CLASH_MIN_PATH {
                continue;
            }
            let limit = CLASH_FRACTION * (el[i].vdw_radius() + el[j].vdw_radius());
            if (x[i] - x[j]).norm() < limit {
                internal_clash = false;
                break 'outer;
            }
        }
    }

    let protein_ligand_clash = receptor.atoms.iter().filter(|a| a.atom.is_heavy()).all(|ra| {
        (0..n).all(|i| {
            let limit = CLASH_FRACTION * (el[i].vdw_radius() + ra.atom.element.vdw_radius());
            (x[i] - ra.atom.position).norm() >= limit
        })
    });

    let in_pocket = (geom::centroid(x) - pocket.center).norm() <= pocket.radius;

    let mut node_of = vec![usize::MAX; mol.atoms.len()];
    for (k, &i) in graph.atom_index.iter().enumerate() {
        node_of[i] = k;
    }
    let flat_aromatic_rings = mol.rings.iter().all(|ring| {
        let aromatic = (0..ring.len()).all(|k| {
            let (a, b) = (ring[k], ring[(k + 1) % ring.len()]);
            mol.bonds.iter().any(|bond| {
                bond.order == BondOrder::Aromatic && ((bond.a == a && bond.b == b) || (bond.a == b && bond.b == a))
            })
        });
        if !aromatic {
            return true;
        }
        let pts: Vec<Vec3> = ring.iter().map(|&i| x[node_of[i]]).collect();
        geom::max_plane_deviation(&pts) <= PLANARITY_TOLERANCE
    });

    let pb_valid =
        bond_lengths && bond_angles && internal_clash && protein_ligand_clash && in_pocket && flat_aromatic_rings;
    ValidityReport {
        bond_lengths,
        bond_angles,
        internal_clash,
        protein_ligand_clash,
        in_pocket,
        flat_aromatic_rings,
        pb_valid,
    }
}
