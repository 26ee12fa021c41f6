use dockforge::datagen::gen_toy_complex;
use dockforge::geom::Vec3;
use dockforge::molio::*;
use dockforge::Error;
use proptest::prelude::*;
use std::collections::BTreeSet;

fn carbon_graph(name: &str, n: usize, edges: &[(usize, usize)]) -> Molecule {
    let atoms = (0..n)
        .map(|k| Atom::new(Element::C, Vec3::new(1.5 * k as f64, (k % 3) as f64, (k % 2) as f64)))
        .collect();
    let bonds = edges
        .iter()
        .map(|&(a, b)| Bond {
            a,
            b,
            order: BondOrder::Single,
        })
        .collect();
    Molecule {
        name: name.into(),
        atoms,
        bonds,
        rings: vec![],
        rotatable_bonds: vec![],
    }
}

type Edge = (usize, usize);

fn heavy_edges(mol: &Molecule) -> Vec<Edge> {
    mol.bonds
        .iter()
        .filter(|b| mol.atoms[b.a].is_heavy() && mol.atoms[b.b].is_heavy())
        .map(|b| (b.a.min(b.b), b.a.max(b.b)))
        .collect()
}

/// Every simple cycle, as a sorted edge set, by depth-first search from
/// each cycle's smallest vertex.
fn all_cycles(n: usize, edges: &[Edge]) -> BTreeSet<Vec<Edge>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut out = BTreeSet::new();
    fn dfs(adj: &[Vec<usize>], start: usize, path: &mut Vec<usize>, out: &mut BTreeSet<Vec<Edge>>) {
        let last = *path.last().unwrap();
        for &next in &adj[last] {
            if next == start && path.len() >= 3 {
                let mut cyc: Vec<Edge> = path
                    .windows(2)
                    .map(|w| (w[0].min(w[1]), w[0].max(w[1])))
                    .chain(std::iter::once((start.min(last), start.max(last))))
                    .collect();
                cyc.sort();
                out.insert(cyc);
            } else if next > start && !path.contains(&next) {
                path.push(next);
                dfs(adj, start, path, out);
                path.pop();
            }
        }
    }
    for s in 0..n {
        dfs(&adj, s, &mut vec![s], &mut out);
    }
    out
}

/// GF(2) rank of edge-incidence vectors.
fn rank(vectors: &[Vec<bool>]) -> usize {
    let mut rows: Vec<Vec<bool>> = vectors.to_vec();
    let width = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for col in 0..width {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][col]) else {
            continue;
        };
        rows.swap(r, p);
        for i in 0..rows.len() {
            if i != r && rows[i][col] {
                let pivot = rows[r].clone();
                for (x, y) in rows[i].iter_mut().zip(pivot) {
                    *x ^= y;
                }
            }
        }
        r += 1;
    }
    r
}

fn incidence(cycle: &[Edge], edges: &[Edge]) -> Vec<bool> {
    edges.iter().map(|e| cycle.contains(e)).collect()
}

/// Ring sizes of a minimum cycle basis: greedy selection of independent
/// cycles in order of length.
fn minimum_basis_sizes(n: usize, edges: &[Edge]) -> Vec<usize> {
    let mut cycles: Vec<Vec<Edge>> = all_cycles(n, edges).into_iter().collect();
    cycles.sort_by_key(Vec::len);
    let mut basis: Vec<Vec<bool>> = Vec::new();
    let mut sizes = Vec::new();
    for c in cycles {
        basis.push(incidence(&c, edges));
        if rank(&basis) == basis.len() {
            sizes.push(c.len());
        } else {
            basis.pop();
        }
    }
    sizes
}

fn check_rings(mol: &Molecule) {
    let perceived = perceive_topology(mol).unwrap();
    let edges = heavy_edges(mol);
    let ring_edges: Vec<Vec<Edge>> = perceived
        .rings
        .iter()
        .map(|ring| {
            let mut e: Vec<Edge> = (0..ring.len())
                .map(|k| {
                    let (a, b) = (ring[k], ring[(k + 1) % ring.len()]);
                    (a.min(b), a.max(b))
                })
                .collect();
            e.sort();
            e
        })
        .collect();
    for (ring, e) in perceived.rings.iter().zip(&ring_edges) {
        assert!(
            e.iter().all(|x| edges.contains(x)),
            "{}: ring {ring:?} is not a cycle",
            mol.name
        );
        assert_eq!(
            e.iter().collect::<BTreeSet<_>>().len(),
            ring.len(),
            "{}: ring repeats an edge",
            mol.name
        );
    }
    let vectors: Vec<Vec<bool>> = ring_edges.iter().map(|c| incidence(c, &edges)).collect();
    assert_eq!(rank(&vectors), vectors.len(), "{}: rings are dependent", mol.name);
    let mut sizes: Vec<usize> = perceived.rings.iter().map(Vec::len).collect();
    sizes.sort();
    assert_eq!(sizes, minimum_basis_sizes(mol.atoms.len(), &edges), "{}", mol.name);
}

/// Single non-ring bonds between atoms with at least two heavy
/// neighbours; ring membership is decided by deleting the bond and
/// checking reachability.
fn rotatable_oracle(mol: &Molecule) -> BTreeSet<usize> {
    let heavy_deg = |i: usize| {
        mol.bonds
            .iter()
            .filter(|b| (b.a == i || b.b == i) && mol.atoms[b.other(i)].is_heavy())
            .count()
    };
    let reachable_without = |skip: usize, from: usize, to: usize| {
        let mut seen = vec![false; mol.atoms.len()];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(u) = stack.pop() {
            if u == to {
                return true;
            }
            for (k, b) in mol.bonds.iter().enumerate() {
                if k != skip && (b.a == u || b.b == u) {
                    let v = b.other(u);
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
        }
        false
    };
    mol.bonds
        .iter()
        .enumerate()
        .filter(|(k, b)| {
            b.order == BondOrder::Single
                && mol.atoms[b.a].is_heavy()
                && mol.atoms[b.b].is_heavy()
                && heavy_deg(b.a) >= 2
                && heavy_deg(b.b) >= 2
                && !reachable_without(*k, b.a, b.b)
        })
        .map(|(k, _)| k)
        .collect()
}

#[test]
fn hand_built_ring_systems_match_cycle_enumeration() {
    let ring = |n: usize| -> Vec<(usize, usize)> { (0..n).map(|k| (k, (k + 1) % n)).collect() };
    let mut naphthalene = ring(10);
    naphthalene.push((0, 5));
    let cubane = vec![
        (0, 1),
        (1, 2),
        (2, 3),
        (3, 0),
        (4, 5),
        (5, 6),
        (6, 7),
        (7, 4),
        (0, 4),
        (1, 5),
        (2, 6),
        (3, 7),
    ];
    let mut spiro = ring(5);
    spiro.extend([(0, 5), (5, 6), (6, 7), (7, 8), (8, 0)]);
    let mut norbornane = ring(6);
    norbornane.extend([(0, 6), (6, 3)]);
    let mut biphenyl = ring(6);
    biphenyl.extend([(6, 7), (7, 8), (8, 9), (9, 10), (10, 11), (11, 6), (0, 6)]);
    let mut chain_of_rings = Vec::new();
    for r in 0..4 {
        let o = 5 * r;
        chain_of_rings.extend([(o, o + 1), (o + 1, o + 2), (o + 2, o + 3), (o + 3, o + 4), (o + 4, o)]);
        if r > 0 {
            chain_of_rings.push((o - 1, o));
        }
    }
    let cases = [
        ("cyclohexane", 6, ring(6)),
        ("naphthalene", 10, naphthalene),
        ("cubane", 8, cubane),
        ("spiro", 9, spiro),
        ("norbornane", 7, norbornane),
        ("biphenyl", 12, biphenyl),
        ("four_rings", 20, chain_of_rings),
    ];
    for (name, n, edges) in cases {
        let mol = carbon_graph(name, n, &edges);
        check_rings(&mol);
        let p = perceive_topology(&mol).unwrap();
        assert_eq!(
            p.rotatable_bonds.iter().copied().collect::<BTreeSet<_>>(),
            rotatable_oracle(&mol),
            "{name}"
        );
    }
}

#[test]
fn toy_ligands_match_topology_oracles() {
    for seed in 0..60u64 {
        let c = gen_toy_complex(seed, 6 + seed as usize % 11).unwrap();
        check_rings(&c.molecule);
        let p = perceive_topology(&c.molecule).unwrap();
        assert_eq!(p, perceive_topology(&p).unwrap(), "not idempotent");
        assert_eq!(
            p.rotatable_bonds.iter().copied().collect::<BTreeSet<_>>(),
            rotatable_oracle(&c.molecule)
        );
    }
}

#[test]
fn disconnected_heavy_graph_is_a_topology_error() {
    let mol = carbon_graph("two", 4, &[(0, 1), (2, 3)]);
    assert!(matches!(perceive_topology(&mol), Err(Error::Topology(_))));
}

fn max_delta(a: &[Vec3], b: &[Vec3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs().max()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn pose_round_trips_within_format_precision(
        seed in 0u64..5_000,
        n in 6usize..=16,
        shift in prop::array::uniform3(-50.0f64..50.0),
    ) {
        let c = gen_toy_complex(seed, n).unwrap();
        let pose = c.crystal.translated(Vec3::from(shift));
        let text = write_pose(&c.molecule, &pose).unwrap();
        let back = parse_ligand(&text).unwrap();
        prop_assert_eq!(back.atoms.len(), c.molecule.atoms.len());
        prop_assert!(back.atoms.iter().zip(&c.molecule.atoms).all(|(a, b)| a.element == b.element));
        prop_assert_eq!(&back.bonds, &c.molecule.bonds);
        prop_assert!(max_delta(&back.heavy_positions(), &pose.coordinates) <= 1e-4 + 1e-12);
        let crlf = text.replace('\n', "\r\n");
        prop_assert_eq!(parse_ligand(&crlf).unwrap(), back);
    }

    #[test]
    fn receptor_round_trips(seed in 0u64..5_000) {
        let c = gen_toy_complex(seed, 8).unwrap();
        let back = parse_receptor(&write_receptor(&c.receptor)).unwrap();
        prop_assert_eq!(back.atoms.len(), c.receptor.atoms.len());
        prop_assert_eq!(&back.sequences, &c.receptor.sequences);
        let moved: Vec<Vec3> = back.atoms.iter().map(|a| a.atom.position).collect();
        let orig: Vec<Vec3> = c.receptor.atoms.iter().map(|a| a.atom.position).collect();
        prop_assert!(max_delta(&moved, &orig) <= 5e-4 + 1e-12);
        for (a, b) in back.atoms.iter().zip(&c.receptor.atoms) {
            prop_assert_eq!((&a.name, &a.residue_name, a.chain, a.residue_seq), (&b.name, &b.residue_name, b.chain, b.residue_seq));
            prop_assert_eq!(a.atom.element, b.atom.element);
        }
    }
}

#[test]
fn pose_with_wrong_count_or_nan_is_rejected() {
    let c = gen_toy_complex(1, 8).unwrap();
    let mut short = c.crystal.clone();
    short.coordinates.pop();
    assert!(matches!(write_pose(&c.molecule, &short), Err(Error::Contract(_))));
    let mut nan = c.crystal.clone();
    nan.coordinates[0].x = f64::NAN;
    assert!(matches!(write_pose(&c.molecule, &nan), Err(Error::Contract(_))));
}

#[test]
fn bond_to_missing_atom_names_the_bond_line() {
    let mut text = write_ligand(&gen_toy_complex(2, 6).unwrap().molecule);
    let lines: Vec<&str> = text.lines().collect();
    let n_atoms: usize = lines[3][0..3].trim().parse().unwrap();
    let bond_line = 4 + n_atoms;
    let bad = format!("{:>3}{:>3}{:>3}  0", 1, 99, 1);
    let mut owned: Vec<String> = lines.iter().map(|s| s.to_string()).collect();
    owned[bond_line] = bad;
    text = owned.join("\n");
    match parse_ligand(&text) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, bond_line + 1),
        other => panic!("expected parse error, got {other:?}"),
    }
}
