use crate::evalkit::sequence_identity;
use crate::molio::Receptor;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    /// Cluster id of each receptor, in input order.
    pub cluster_of: Vec<usize>,
    pub cluster_sizes: BTreeMap<usize, usize>,
    pub identity_threshold: f64,
}

impl ClusterAssignment {
    pub fn n_clusters(&self) -> usize {
        self.cluster_sizes.len()
    }
}

/// Greedy centroid clustering on (name, sequence) pairs.
///
/// Sequences are visited by descending length, ties broken by name. Each
/// joins the first centroid (in creation order) with identity at or above
/// the threshold, or founds a new cluster.
pub fn cluster_named_sequences(items: &[(&str, &str)], identity_threshold: f64) -> ClusterAssignment {
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by(|&a, &b| {
        items[b]
            .1
            .len()
            .cmp(&items[a].1.len())
            .then_with(|| items[a].0.cmp(items[b].0))
            .then(a.cmp(&b))
    });
    let mut centroids: Vec<usize> = Vec::new();
    let mut cluster_of = vec![usize::MAX; items.len()];
    for &i in &order {
        let hit = centroids
            .iter()
            .position(|&c| sequence_identity(items[c].1, items[i].1) >= identity_threshold);
        match hit {
            Some(k) => cluster_of[i] = k,
            None => {
                cluster_of[i] = centroids.len();
                centroids.push(i);
            }
        }
    }
    let mut cluster_sizes = BTreeMap::new();
    for &c in &cluster_of {
        *cluster_sizes.entry(c).or_insert(0) += 1;
    }
    ClusterAssignment {
        cluster_of,
        cluster_sizes,
        identity_threshold,
    }
}

pub fn cluster_sequences(receptors: &[Receptor], identity_threshold: f64) -> ClusterAssignment {
    let seqs: Vec<String> = receptors.iter().map(Receptor::full_sequence).collect();
    let items: Vec<(&str, &str)> = receptors
        .iter()
        .zip(&seqs)
        .map(|(r, s)| (r.name.as_str(), s.as_str()))
        .collect();
    cluster_named_sequences(&items, identity_threshold)
}

/// Per-receptor sampling probability: 1 / cluster size, normalised so
/// every cluster carries the same total mass.
pub fn sampling_weights(assignment: &ClusterAssignment) -> Vec<f64> {
    let n_clusters = assignment.n_clusters() as f64;
    assignment
        .cluster_of
        .iter()
        .map(|c| 1.0 / (assignment.cluster_sizes[c] as f64 * n_clusters))
        .collect()
}

/// Inverse-CDF draw from a discrete distribution.
pub fn sample_index(weights: &[f64], u: f64) -> usize {
    let total: f64 = weights.iter().sum();
    let target = u * total;
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if target < acc {
            return i;
        }
    }
    weights.len() - 1
}
