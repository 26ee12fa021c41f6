//! Grid-based cavity detection.

use crate::geom::Vec3;
use crate::molio::{Pocket, Receptor};
use std::collections::HashMap;

pub const GRID_SPACING: f64 = 1.0;
pub const BOX_MARGIN: f64 = 3.0;
pub const CLEARANCE: f64 = 2.5;
pub const SCAN_RANGE: f64 = 10.0;
pub const BURIED_MIN_HITS: usize = 12;
pub const LINKAGE: f64 = 2.0;
pub const POCKET_PADDING: f64 = 3.0;
/// A scan ray "hits" an atom when it passes within the atom's van der
/// Waals radius; this bounds the lookup radius for the spatial hash.
const MAX_HIT_RADIUS: f64 = 2.0;
const RAY_STEP: f64 = 0.5;
const MAX_POCKETS: usize = 2;

/// The 26 lattice directions of a 3x3x3 neighbourhood.
pub fn scan_directions() -> Vec<Vec3> {
    let mut out = Vec::with_capacity(26);
    for x in -1i32..=1 {
        for y in -1i32..=1 {
            for z in -1i32..=1 {
                if (x, y, z) != (0, 0, 0) {
                    out.push(Vec3::new(x as f64, y as f64, z as f64).normalize());
                }
            }
        }
    }
    out
}

struct AtomHash {
    cell: f64,
    map: HashMap<(i64, i64, i64), Vec<(Vec3, f64)>>,
}

impl AtomHash {
    fn new(points: impl Iterator<Item = (Vec3, f64)>, cell: f64) -> Self {
        let mut map: HashMap<(i64, i64, i64), Vec<(Vec3, f64)>> = HashMap::new();
        for (p, r) in points {
            map.entry(Self::key(&p, cell)).or_default().push((p, r));
        }
        Self { cell, map }
    }

    fn key(p: &Vec3, cell: f64) -> (i64, i64, i64) {
        (
            (p.x / cell).floor() as i64,
            (p.y / cell).floor() as i64,
            (p.z / cell).floor() as i64,
        )
    }

    /// Whether any atom satisfies `test(distance, radius)`; only atoms in
    /// neighbouring cells are examined, so the test must imply distance <= cell.
    fn any(&self, p: &Vec3, test: impl Fn(f64, f64) -> bool) -> bool {
        let (cx, cy, cz) = Self::key(p, self.cell);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(list) = self.map.get(&(cx + dx, cy + dy, cz + dz)) {
                        if list.iter().any(|(q, r)| test((q - p).norm(), *r)) {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }
}

fn heavy_atoms(receptor: &Receptor) -> Vec<(Vec3, f64)> {
    receptor
        .atoms
        .iter()
        .filter(|a| a.atom.is_heavy())
        .map(|a| (a.atom.position, a.atom.element.vdw_radius().min(MAX_HIT_RADIUS)))
        .collect()
}

fn count_buried(hash: &AtomHash, p: &Vec3, dirs: &[Vec3]) -> usize {
    let steps = (SCAN_RANGE / RAY_STEP).round() as usize;
    dirs.iter()
        .filter(|d| (1..=steps).any(|k| hash.any(&(p + *d * (k as f64 * RAY_STEP)), |dist, r| dist < r)))
        .count()
}

/// Number of scan directions (out of 26) that hit a receptor atom within
/// 10 Å of `point`.
pub fn buriedness_at(receptor: &Receptor, point: &Vec3) -> f64 {
    let hash = AtomHash::new(heavy_atoms(receptor).into_iter(), CLEARANCE.max(MAX_HIT_RADIUS));
    count_buried(&hash, point, &scan_directions()) as f64
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Detects up to two cavities, ranked by size x buriedness.
///
/// Cavity points lie on a 1 Å grid over the receptor bounding box (plus
/// 3 Å), at least 2.5 Å from every heavy atom, with at least 12 of 26 scan
/// rays hitting an atom within 10 Å. Points are grouped by 2 Å single
/// linkage; each group yields a pocket centred on its centroid with radius
/// max point distance + 3 Å, clamped to [4, 20].
pub fn detect_pockets(receptor: &Receptor) -> Vec<Pocket> {
    let atoms = heavy_atoms(receptor);
    if atoms.is_empty() {
        return Vec::new();
    }
    let mut lo = Vec3::repeat(f64::INFINITY);
    let mut hi = Vec3::repeat(f64::NEG_INFINITY);
    for (p, _) in &atoms {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    lo -= Vec3::repeat(BOX_MARGIN);
    hi += Vec3::repeat(BOX_MARGIN);
    let dims = [0, 1, 2].map(|k| ((hi[k] - lo[k]) / GRID_SPACING).floor() as i64 + 1);
    let hash = AtomHash::new(atoms.iter().copied(), CLEARANCE.max(MAX_HIT_RADIUS));
    let dirs = scan_directions();

    let mut points: Vec<(Vec3, usize)> = Vec::new();
    let mut index: HashMap<(i64, i64, i64), usize> = HashMap::new();
    for i in 0..dims[0] {
        for j in 0..dims[1] {
            for k in 0..dims[2] {
                let p = lo + Vec3::new(i as f64, j as f64, k as f64) * GRID_SPACING;
                if hash.any(&p, |dist, _| dist < CLEARANCE) {
                    continue;
                }
                let hits = count_buried(&hash, &p, &dirs);
                if hits >= BURIED_MIN_HITS {
                    index.insert((i, j, k), points.len());
                    points.push((p, hits));
                }
            }
        }
    }
    if points.is_empty() {
        return Vec::new();
    }

    // Single linkage over grid neighbours within 2 Å.
    let reach = (LINKAGE / GRID_SPACING).floor() as i64;
    let mut parent: Vec<usize> = (0..points.len()).collect();
    let keys: Vec<(i64, i64, i64)> = {
        let mut v: Vec<_> = index.iter().map(|(k, &idx)| (idx, *k)).collect();
        v.sort();
        v.into_iter().map(|(_, k)| k).collect()
    };
    for (a, key) in keys.iter().enumerate() {
        for dx in -reach..=reach {
            for dy in -reach..=reach {
                for dz in -reach..=reach {
                    let d2 = (dx * dx + dy * dy + dz * dz) as f64 * GRID_SPACING * GRID_SPACING;
                    if d2 == 0.0 || d2 > LINKAGE * LINKAGE + 1e-9 {
                        continue;
                    }
                    if let Some(&b) = index.get(&(key.0 + dx, key.1 + dy, key.2 + dz)) {
                        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                        if ra != rb {
                            parent[ra.max(rb)] = ra.min(rb);
                        }
                    }
                }
            }
        }
    }
    let mut clusters: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..points.len() {
        let root = find(&mut parent, i);
        clusters.entry(root).or_default().push(i);
    }
    let mut ranked: Vec<(f64, usize, Pocket)> = clusters
        .into_iter()
        .map(|(root, members)| {
            let pts: Vec<Vec3> = members.iter().map(|&m| points[m].0).collect();
            let center = crate::geom::centroid(&pts);
            let spread = pts.iter().map(|p| (p - center).norm()).fold(0.0, f64::max);
            let buriedness = members.iter().map(|&m| points[m].1 as f64).sum::<f64>() / members.len() as f64;
            let pocket = Pocket::around(receptor, center, spread + POCKET_PADDING, buriedness);
            (members.len() as f64 * buriedness, root, pocket)
        })
        .collect();
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    ranked.into_iter().take(MAX_POCKETS).map(|(_, _, p)| p).collect()
}
