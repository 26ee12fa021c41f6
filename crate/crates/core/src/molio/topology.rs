//! Ring perception and rotatable-bond detection on the heavy-atom graph.

use super::{BondOrder, Molecule};
use crate::{Error, Result};
use std::collections::VecDeque;

/// Heavy-atom bond graph. Node `k` is the k-th heavy atom, matching pose
/// coordinate order.
#[derive(Debug, Clone)]
pub struct HeavyGraph {
    /// Original atom index of each node.
    pub atom_index: Vec<usize>,
    /// Neighbours with the index of the connecting bond in `Molecule::bonds`.
    pub adjacency: Vec<Vec<(usize, usize)>>,
    /// Heavy-heavy bonds as (node, node, order, bond index).
    pub edges: Vec<(usize, usize, BondOrder, usize)>,
}

impl HeavyGraph {
    pub fn new(mol: &Molecule) -> Self {
        let atom_index = mol.heavy_indices();
        let mut node_of = vec![usize::MAX; mol.atoms.len()];
        for (k, &i) in atom_index.iter().enumerate() {
            node_of[i] = k;
        }
        let mut adjacency = vec![Vec::new(); atom_index.len()];
        let mut edges = Vec::new();
        for (bi, bond) in mol.bonds.iter().enumerate() {
            let (u, v) = (node_of[bond.a], node_of[bond.b]);
            if u == usize::MAX || v == usize::MAX {
                continue;
            }
            adjacency[u].push((v, bi));
            adjacency[v].push((u, bi));
            edges.push((u, v, bond.order, bi));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Self {
            atom_index,
            adjacency,
            edges,
        }
    }

    pub fn len(&self) -> usize {
        self.atom_index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atom_index.is_empty()
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn neighbors(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[node].iter().map(|&(v, _)| v)
    }

    pub fn is_connected(&self) -> bool {
        if self.is_empty() {
            return true;
        }
        self.bfs_distances(0).iter().all(|&d| d != usize::MAX)
    }

    /// Shortest path lengths (in bonds) from `src`.
    pub fn bfs_distances(&self, src: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.len()];
        let mut queue = VecDeque::from([src]);
        dist[src] = 0;
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

    /// All-pairs topological distances.
    pub fn path_distances(&self) -> Vec<Vec<usize>> {
        (0..self.len()).map(|s| self.bfs_distances(s)).collect()
    }

    /// Nodes on the `other` side of edge (u, v) when the edge is removed,
    /// or `None` if (u, v) lies on a cycle.
    pub fn side_of(&self, u: usize, v: usize) -> Option<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        seen[v] = true;
        let mut stack = vec![v];
        let mut side = Vec::new();
        while let Some(x) = stack.pop() {
            side.push(x);
            for y in self.neighbors(x) {
                if x == v && y == u {
                    continue;
                }
                if y == u {
                    return None;
                }
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        side.sort_unstable();
        Some(side)
    }

    fn bfs_tree(&self, src: usize) -> (Vec<usize>, Vec<usize>) {
        let mut dist = vec![usize::MAX; self.len()];
        let mut parent = vec![usize::MAX; self.len()];
        let mut queue = VecDeque::from([src]);
        dist[src] = 0;
        while let Some(u) = queue.pop_front() {
            for v in self.neighbors(u) {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        (dist, parent)
    }
}

fn path_to_root(parent: &[usize], mut node: usize) -> Vec<usize> {
    let mut path = vec![node];
    while parent[node] != usize::MAX {
        node = parent[node];
        path.push(node);
    }
    path
}

/// Rotates a cycle so it starts at its smallest node and proceeds toward the
/// smaller of that node's two ring neighbours.
pub(crate) fn canonical_cycle(cycle: &[usize]) -> Vec<usize> {
    let n = cycle.len();
    let (start, _) = cycle
        .iter()
        .enumerate()
        .min_by_key(|(_, &v)| v)
        .expect("non-empty cycle");
    let fwd: Vec<usize> = (0..n).map(|k| cycle[(start + k) % n]).collect();
    let bwd: Vec<usize> = (0..n).map(|k| cycle[(start + n - k) % n]).collect();
    if n > 1 && bwd[1] < fwd[1] {
        bwd
    } else {
        fwd
    }
}

pub(crate) fn cycle_edge_vector(graph: &HeavyGraph, cycle: &[usize]) -> Vec<bool> {
    let mut vec = vec![false; graph.edges.len()];
    for k in 0..cycle.len() {
        let (a, b) = (cycle[k], cycle[(k + 1) % cycle.len()]);
        let e = graph
            .edges
            .iter()
            .position(|&(u, v, _, _)| (u == a && v == b) || (u == b && v == a))
            .expect("cycle edge present in graph");
        vec[e] = true;
    }
    vec
}

/// Greedy GF(2) independence filter over cycles sorted by length.
pub(crate) fn select_independent(graph: &HeavyGraph, mut candidates: Vec<Vec<usize>>, rank: usize) -> Vec<Vec<usize>> {
    candidates.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    candidates.dedup();
    // Rows are reduced against all earlier rows, so a single in-order pass
    // clears every pivot of a new vector.
    let mut basis: Vec<(usize, Vec<bool>)> = Vec::new();
    let mut chosen = Vec::new();
    for cycle in candidates {
        if chosen.len() == rank {
            break;
        }
        let mut v = cycle_edge_vector(graph, &cycle);
        for (pivot, row) in &basis {
            if v[*pivot] {
                for (x, r) in v.iter_mut().zip(row) {
                    *x ^= *r;
                }
            }
        }
        if let Some(pivot) = v.iter().position(|&x| x) {
            basis.push((pivot, v));
            chosen.push(cycle);
        }
    }
    chosen
}

/// Minimum cycle basis via Horton candidates: for every node `w` and edge
/// (u, v), the cycle formed by the BFS-tree paths w..u, w..v and the edge,
/// kept when the two paths share only `w`.
fn minimum_cycle_basis(graph: &HeavyGraph) -> Vec<Vec<usize>> {
    // Cyclomatic number of a connected graph.
    if graph.edges.len() < graph.len() {
        return Vec::new();
    }
    let rank = graph.edges.len() + 1 - graph.len();
    let mut candidates = Vec::new();
    for w in 0..graph.len() {
        let (dist, parent) = graph.bfs_tree(w);
        for &(u, v, _, _) in &graph.edges {
            if parent[u] == v || parent[v] == u {
                continue;
            }
            if dist[u] == usize::MAX || dist[v] == usize::MAX {
                continue;
            }
            let pu = path_to_root(&parent, u);
            let pv = path_to_root(&parent, v);
            let shared = pu.iter().filter(|x| pv.contains(x)).count();
            if shared != 1 {
                continue;
            }
            // pu = u..w, pv = v..w; cycle u..w..v
            let mut cycle: Vec<usize> = pu.clone();
            cycle.extend(pv.iter().rev().skip(1));
            candidates.push(canonical_cycle(&cycle));
        }
    }
    select_independent(graph, candidates, rank)
}

/// Perceives rings (minimum cycle basis of the heavy-atom graph) and
/// rotatable bonds. Deterministic and idempotent.
pub fn perceive_topology(mol: &Molecule) -> Result<Molecule> {
    mol.validate_bonds()?;
    let graph = HeavyGraph::new(mol);
    if graph.is_empty() {
        return Err(Error::Topology(format!("'{}' has no heavy atoms", mol.name)));
    }
    if !graph.is_connected() {
        return Err(Error::Topology(format!(
            "heavy-atom graph of '{}' is disconnected",
            mol.name
        )));
    }
    let cycles = minimum_cycle_basis(&graph);
    let mut in_ring = vec![false; mol.bonds.len()];
    for cycle in &cycles {
        for k in 0..cycle.len() {
            let (a, b) = (cycle[k], cycle[(k + 1) % cycle.len()]);
            if let Some(&(_, bi)) = graph.adjacency[a].iter().find(|&&(v, _)| v == b) {
                in_ring[bi] = true;
            }
        }
    }
    let rings: Vec<Vec<usize>> = cycles
        .iter()
        .map(|c| c.iter().map(|&k| graph.atom_index[k]).collect())
        .collect();
    let rotatable_bonds = graph
        .edges
        .iter()
        .filter(|&&(u, v, order, bi)| {
            order == BondOrder::Single && !in_ring[bi] && graph.degree(u) >= 2 && graph.degree(v) >= 2
        })
        .map(|&(_, _, _, bi)| bi)
        .collect::<Vec<_>>();
    let mut out = mol.clone();
    out.rings = rings;
    let mut rot = rotatable_bonds;
    rot.sort_unstable();
    out.rotatable_bonds = rot;
    Ok(out)
}
