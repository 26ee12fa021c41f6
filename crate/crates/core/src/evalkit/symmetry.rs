//! Graph automorphisms of the element-labelled heavy-atom graph and the
//! symmetry-corrected RMSD built on them.

use super::rmsd::rmsd_coords;
use crate::molio::{HeavyGraph, Molecule, Pose};
use crate::Result;

/// Maximum number of automorphisms enumerated before falling back to the
/// identity mapping.
pub const AUTOMORPHISM_CAP: usize = 10_000;

#[derive(Debug, Clone)]
pub struct Automorphisms {
    /// Each mapping sends heavy node `i` to `mapping[i]`.
    pub mappings: Vec<Vec<usize>>,
    pub capped: bool,
}

impl Automorphisms {
    pub fn of(mol: &Molecule) -> Self {
        let graph = HeavyGraph::new(mol);
        let elements: Vec<_> = graph.atom_index.iter().map(|&i| mol.atoms[i].element).collect();
        let n = graph.len();
        let mut adj = vec![vec![false; n]; n];
        for &(u, v, _, _) in &graph.edges {
            adj[u][v] = true;
            adj[v][u] = true;
        }
        // Visit nodes in BFS order so each new node usually has a mapped
        // neighbour, which prunes early.
        let mut order = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut queue = std::collections::VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                order.push(u);
                for v in graph.neighbors(u) {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
        }
        let degree: Vec<usize> = (0..n).map(|i| graph.degree(i)).collect();
        let mut search = Search {
            adj: &adj,
            elements: &elements,
            degree: &degree,
            order: &order,
            mapping: vec![usize::MAX; n],
            used: vec![false; n],
            found: Vec::new(),
            capped: false,
        };
        search.extend(0);
        if search.capped {
            return Self {
                mappings: vec![(0..n).collect()],
                capped: true,
            };
        }
        Self {
            mappings: search.found,
            capped: false,
        }
    }

    pub fn len(&self) -> usize {
        self.mappings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mappings.is_empty()
    }
}

struct Search<'a> {
    adj: &'a [Vec<bool>],
    elements: &'a [crate::molio::Element],
    degree: &'a [usize],
    order: &'a [usize],
    mapping: Vec<usize>,
    used: Vec<bool>,
    found: Vec<Vec<usize>>,
    capped: bool,
}

impl Search<'_> {
    fn extend(&mut self, depth: usize) {
        if self.capped {
            return;
        }
        if depth == self.order.len() {
            if self.found.len() == AUTOMORPHISM_CAP {
                self.capped = true;
                return;
            }
            self.found.push(self.mapping.clone());
            return;
        }
        let i = self.order[depth];
        for j in 0..self.adj.len() {
            if self.used[j] || self.elements[j] != self.elements[i] || self.degree[j] != self.degree[i] {
                continue;
            }
            let consistent = self.order[..depth]
                .iter()
                .all(|&k| self.adj[i][k] == self.adj[j][self.mapping[k]]);
            if !consistent {
                continue;
            }
            self.mapping[i] = j;
            self.used[j] = true;
            self.extend(depth + 1);
            self.used[j] = false;
            self.mapping[i] = usize::MAX;
            if self.capped {
                return;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryRmsd {
    pub rmsd: f64,
    pub n_automorphisms: usize,
    /// Enumeration hit [`AUTOMORPHISM_CAP`]; the value is the identity RMSD.
    pub capped: bool,
}

impl Automorphisms {
    pub fn min_rmsd(&self, reference: &Pose, predicted: &Pose) -> Result<SymmetryRmsd> {
        let mut best = rmsd_coords(&reference.coordinates, &predicted.coordinates)?;
        let mut permuted = predicted.coordinates.clone();
        for m in &self.mappings {
            if m.len() != permuted.len() {
                continue;
            }
            for (i, &j) in m.iter().enumerate() {
                permuted[i] = predicted.coordinates[j];
            }
            best = best.min(rmsd_coords(&reference.coordinates, &permuted)?);
        }
        Ok(SymmetryRmsd {
            rmsd: best,
            n_automorphisms: self.mappings.len(),
            capped: self.capped,
        })
    }
}

/// Minimum RMSD over all automorphisms of the element-labelled heavy-atom
/// bond graph.
pub fn rmsd_symm(mol: &Molecule, reference: &Pose, predicted: &Pose) -> Result<SymmetryRmsd> {
    Automorphisms::of(mol).min_rmsd(reference, predicted)
}
