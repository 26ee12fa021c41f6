use dockforge::datagen::gen_toy_complex;
use dockforge::evalkit::*;
use dockforge::geom::Vec3;
use dockforge::molio::*;
use dockforge::rng::rng_from_seed;
use dockforge::Error;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use std::collections::BTreeMap;

/// Every permutation of `0..n` that keeps elements and maps the heavy
/// bond graph onto itself, found by filtering the full product of
/// per-element permutations.
fn brute_automorphisms(mol: &Molecule) -> Vec<Vec<usize>> {
    let heavy = mol.heavy_indices();
    let n = heavy.len();
    let mut node = vec![usize::MAX; mol.atoms.len()];
    for (k, &i) in heavy.iter().enumerate() {
        node[i] = k;
    }
    let mut adj = vec![vec![false; n]; n];
    for b in &mol.bonds {
        if node[b.a] != usize::MAX && node[b.b] != usize::MAX {
            adj[node[b.a]][node[b.b]] = true;
            adj[node[b.b]][node[b.a]] = true;
        }
    }
    let mut classes: BTreeMap<Element, Vec<usize>> = BTreeMap::new();
    for (k, &i) in heavy.iter().enumerate() {
        classes.entry(mol.atoms[i].element).or_default().push(k);
    }
    let classes: Vec<Vec<usize>> = classes.into_values().collect();
    let mut found = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    product(&classes, 0, &mut perm, &mut |p: &[usize]| {
        if (0..n).all(|i| (0..n).all(|j| adj[i][j] == adj[p[i]][p[j]])) {
            found.push(p.to_vec());
        }
    });
    found.sort();
    found
}

fn product(classes: &[Vec<usize>], c: usize, perm: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
    if c == classes.len() {
        visit(perm);
        return;
    }
    let members = &classes[c];
    let mut images = members.clone();
    // Heap's algorithm over the images of this class.
    let k = images.len();
    let mut counter = vec![0usize; k];
    let assign = |perm: &mut Vec<usize>, images: &[usize]| {
        for (&m, &img) in members.iter().zip(images) {
            perm[m] = img;
        }
    };
    assign(perm, &images);
    product(classes, c + 1, perm, visit);
    let mut i = 0;
    while i < k {
        if counter[i] < i {
            if i % 2 == 0 {
                images.swap(0, i);
            } else {
                images.swap(counter[i], i);
            }
            assign(perm, &images);
            product(classes, c + 1, perm, visit);
            counter[i] += 1;
            i = 0;
        } else {
            counter[i] = 0;
            i += 1;
        }
    }
}

#[test]
fn symmetry_rmsd_matches_exhaustive_permutation_filter() {
    let mut rng = rng_from_seed(99);
    let mut nontrivial = 0;
    for seed in 0..50u64 {
        let n_atoms = 6 + (seed as usize % 7);
        let c = gen_toy_complex(1000 + seed, n_atoms).unwrap();
        assert!(c.molecule.heavy_count() <= 12);
        let oracle = brute_automorphisms(&c.molecule);
        let mut found = Automorphisms::of(&c.molecule).mappings;
        found.sort();
        assert_eq!(found, oracle, "automorphism sets differ for seed {seed}");
        if oracle.len() > 1 {
            nontrivial += 1;
        }

        // A perturbed crystal relabelled by a random automorphism.
        let sym = &oracle[rng.random_range(0..oracle.len())];
        let mut pred = c.crystal.clone();
        for (i, &j) in sym.iter().enumerate() {
            pred.coordinates[j] = c.crystal.coordinates[i]
                + Vec3::new(
                    rng.random_range(-0.4..0.4),
                    rng.random_range(-0.4..0.4),
                    rng.random_range(-0.4..0.4),
                );
        }
        let want = oracle
            .iter()
            .map(|p| {
                let permuted: Vec<Vec3> = p.iter().map(|&j| pred.coordinates[j]).collect();
                rmsd_coords(&c.crystal.coordinates, &permuted).unwrap()
            })
            .fold(f64::INFINITY, f64::min);
        let got = rmsd_symm(&c.molecule, &c.crystal, &pred).unwrap();
        assert_eq!(got.rmsd, want, "seed {seed}");
        assert!(!got.capped);
        assert!(got.rmsd <= rmsd(&c.crystal, &pred).unwrap());
    }
    assert!(nontrivial >= 10, "only {nontrivial} symmetric molecules");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn symmetry_rmsd_is_zero_on_relabelled_copies(seed in 0u64..10_000, n in 6usize..=12, pick in 0usize..64) {
        let c = gen_toy_complex(seed, n).unwrap();
        let autos = Automorphisms::of(&c.molecule);
        let m = &autos.mappings[pick % autos.len()];
        let mut relabelled = c.crystal.clone();
        for (i, &j) in m.iter().enumerate() {
            relabelled.coordinates[j] = c.crystal.coordinates[i];
        }
        prop_assert_eq!(rmsd_symm(&c.molecule, &c.crystal, &relabelled).unwrap().rmsd, 0.0);
    }

    #[test]
    fn plain_rmsd_is_a_metric_on_translations(dx in -5.0f64..5.0, dy in -5.0f64..5.0, dz in -5.0f64..5.0) {
        let c = gen_toy_complex(3, 9).unwrap();
        let shift = Vec3::new(dx, dy, dz);
        let moved = c.crystal.translated(shift);
        prop_assert!((rmsd(&c.crystal, &moved).unwrap() - shift.norm()).abs() < 1e-9);
        prop_assert_eq!(rmsd(&c.crystal, &moved).unwrap(), rmsd(&moved, &c.crystal).unwrap());
    }
}

fn perfect_ef(total: usize, actives: usize, fraction: f64) -> f64 {
    let n_sel = ((fraction * total as f64) - 1e-9).ceil().max(1.0) as usize;
    let hits = actives.min(n_sel);
    (hits as f64 / n_sel as f64) / (actives as f64 / total as f64)
}

#[test]
fn perfect_ranking_matches_closed_form() {
    for &(total, actives) in &[(100, 1), (100, 5), (200, 30), (1000, 10), (37, 4)] {
        let scores: Vec<f64> = (0..total).map(|i| i as f64).collect();
        let active: Vec<bool> = (0..total).map(|i| i < actives).collect();
        for &f in &[0.005, 0.01, 0.02, 0.05, 0.1, 0.5, 1.0] {
            let ef = enrichment_factor(&scores, &active, f).unwrap();
            assert_eq!(
                ef,
                perfect_ef(total, actives, f),
                "total {total} actives {actives} fraction {f}"
            );
            let n_sel = (f * total as f64).ceil().max(1.0);
            assert!(ef <= (1.0 / f).min(total as f64 / n_sel).max(1.0) * (1.0 + 1e-12));
        }
        assert_eq!(enrichment_factor(&scores, &active, 1.0).unwrap(), 1.0);
    }
    // 5 of 200 active, top 1% is 2 compounds, both active: EF = (2/2)/(5/200) = 40.
    let scores: Vec<f64> = (0..200).map(f64::from).collect();
    let active: Vec<bool> = (0..200).map(|i| i < 5).collect();
    assert_eq!(enrichment_factor(&scores, &active, 0.01).unwrap(), 40.0);
}

#[test]
fn random_ranking_has_unit_mean_enrichment() {
    let mut rng = rng_from_seed(2024);
    let (total, n_active, trials) = (500, 25, 10_000);
    let mut active: Vec<bool> = (0..total).map(|i| i < n_active).collect();
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..trials {
        active.shuffle(&mut rng);
        let scores: Vec<f64> = (0..total).map(|_| rng.random::<f64>()).collect();
        let ef = enrichment_factor(&scores, &active, 0.05).unwrap();
        sum += ef;
        sum_sq += ef * ef;
    }
    let mean = sum / trials as f64;
    let sd = (sum_sq / trials as f64 - mean * mean).sqrt();
    let sem = sd / (trials as f64).sqrt();
    assert!((mean - 1.0).abs() <= 3.0 * sem, "mean {mean} sem {sem}");
}

#[test]
fn enrichment_errors() {
    assert!(matches!(
        enrichment_factor(&[1.0, 2.0], &[false, false], 0.5),
        Err(Error::UndefinedEnrichment(_))
    ));
    assert!(matches!(
        enrichment_factor(&[1.0, 2.0], &[true, false], 0.0),
        Err(Error::Domain(_))
    ));
    assert!(matches!(
        enrichment_factor(&[1.0, 2.0], &[true, false], 1.5),
        Err(Error::Domain(_))
    ));
    assert!(matches!(
        enrichment_factor(&[f64::NAN, 2.0], &[true, false], 0.5),
        Err(Error::Domain(_))
    ));
    assert!(matches!(
        enrichment_factor(&[1.0], &[true, false], 0.5),
        Err(Error::Contract(_))
    ));
}

const CC: f64 = 1.52;
const AROMATIC_CC: f64 = 1.40;

/// Places atom d from c, b, a by bond length, angle at c and dihedral.
fn place(a: Vec3, b: Vec3, c: Vec3, len: f64, angle_deg: f64, dihedral_deg: f64) -> Vec3 {
    let (th, ph) = (angle_deg.to_radians(), dihedral_deg.to_radians());
    let bc = (c - b).normalize();
    let n = (b - a).cross(&bc).normalize();
    let m = n.cross(&bc);
    let local = Vec3::new(-len * th.cos(), len * th.sin() * ph.cos(), len * th.sin() * ph.sin());
    c + bc * local.x + m * local.y + n * local.z
}

fn butane(angle_at_c1: f64, dihedral: f64) -> Molecule {
    let c0 = Vec3::new(0.0, 0.0, 0.0);
    let c1 = Vec3::new(CC, 0.0, 0.0);
    let t = (180.0 - angle_at_c1).to_radians();
    let c2 = c1 + Vec3::new(CC * t.cos(), CC * t.sin(), 0.0);
    let c3 = place(c0, c1, c2, CC, 109.5, dihedral);
    chain_molecule("butane", vec![c0, c1, c2, c3], BondOrder::Single, false)
}

fn benzene(lift: f64) -> Molecule {
    let r = AROMATIC_CC;
    let pts = (0..6)
        .map(|k| {
            let t = k as f64 * std::f64::consts::PI / 3.0;
            Vec3::new(r * t.cos(), r * t.sin(), if k == 0 { lift } else { 0.0 })
        })
        .collect();
    chain_molecule("benzene", pts, BondOrder::Aromatic, true)
}

fn chain_molecule(name: &str, pts: Vec<Vec3>, order: BondOrder, ring: bool) -> Molecule {
    let n = pts.len();
    let atoms = pts.into_iter().map(|p| Atom::new(Element::C, p)).collect();
    let n_bonds = if ring { n } else { n - 1 };
    let bonds = (0..n_bonds)
        .map(|k| Bond {
            a: k,
            b: (k + 1) % n,
            order,
        })
        .collect();
    let mol = Molecule {
        name: name.into(),
        atoms,
        bonds,
        rings: vec![],
        rotatable_bonds: vec![],
    };
    perceive_topology(&mol).unwrap()
}

fn distant_receptor(extra: Option<Vec3>) -> Receptor {
    let mut positions = vec![Vec3::new(30.0, 0.0, 0.0), Vec3::new(0.0, 30.0, 0.0)];
    positions.extend(extra);
    let atoms = positions
        .into_iter()
        .enumerate()
        .map(|(k, p)| ReceptorAtom {
            atom: Atom::new(Element::C, p),
            serial: k as u32 + 1,
            name: "CA".into(),
            residue_name: "GLY".into(),
            chain: 'A',
            residue_seq: k as i32 + 1,
        })
        .collect();
    Receptor {
        name: "fixture".into(),
        atoms,
        sequences: vec![],
        pockets: vec![],
        family_label: None,
    }
}

fn pocket_at(center: Vec3) -> Pocket {
    Pocket {
        center,
        radius: 4.0,
        member_atoms: vec![],
        buriedness_score: 0.0,
    }
}

fn check(mol: &Molecule, receptor: &Receptor, pocket: &Pocket, pose: &Pose) -> Vec<&'static str> {
    validity_check(receptor, pocket, mol, pose).failed_checks()
}

#[test]
fn each_planted_violation_fails_only_its_check() {
    let clean = distant_receptor(None);
    let anti = butane(109.5, 180.0);
    let anti_pose = anti.to_pose(Provenance::Predicted);
    let home = pocket_at(anti_pose.centroid());
    assert!(check(&anti, &clean, &home, &anti_pose).is_empty());
    let flat = benzene(0.0);
    let flat_pose = flat.to_pose(Provenance::Predicted);
    assert!(check(&flat, &clean, &pocket_at(flat_pose.centroid()), &flat_pose).is_empty());

    let c = anti_pose.centroid();
    let stretched = Pose::new(
        anti_pose.coordinates.iter().map(|p| c + (p - c) * 1.35).collect(),
        Provenance::Predicted,
    );
    assert_eq!(check(&anti, &clean, &home, &stretched), vec!["bond_lengths"]);

    let bent = butane(140.0, 180.0);
    let bent_pose = bent.to_pose(Provenance::Predicted);
    assert_eq!(
        check(&bent, &clean, &pocket_at(bent_pose.centroid()), &bent_pose),
        vec!["bond_angles"]
    );

    let syn = butane(109.5, 0.0);
    let syn_pose = syn.to_pose(Provenance::Predicted);
    assert_eq!(
        check(&syn, &clean, &pocket_at(syn_pose.centroid()), &syn_pose),
        vec!["internal_clash"]
    );

    let crowded = distant_receptor(Some(anti_pose.coordinates[0] + Vec3::new(0.0, 0.0, 1.5)));
    assert_eq!(check(&anti, &crowded, &home, &anti_pose), vec!["protein_ligand_clash"]);

    let elsewhere = pocket_at(c + Vec3::new(8.0, 0.0, 0.0));
    assert_eq!(check(&anti, &clean, &elsewhere, &anti_pose), vec!["in_pocket"]);

    let puckered = benzene(0.9);
    let puckered_pose = puckered.to_pose(Provenance::Predicted);
    assert_eq!(
        check(&puckered, &clean, &pocket_at(puckered_pose.centroid()), &puckered_pose),
        vec!["flat_aromatic_rings"]
    );
}

#[test]
fn toy_crystals_pass_every_check() {
    for seed in 0..40u64 {
        let c = gen_toy_complex(500 + seed, 6 + seed as usize % 11).unwrap();
        let report = validity_check(&c.receptor, &c.pocket, &c.molecule, &c.crystal);
        assert!(report.pb_valid, "seed {seed}: {:?}", report.failed_checks());
    }
}

#[test]
fn identity_boundaries_follow_brackets() {
    let test = "ACDEFGHIKL";
    let at_030 = "ACDWWWWWWW";
    let at_090 = "ACDEFGHIKW";
    assert_eq!(sequence_identity(test, at_030), 0.30);
    assert_eq!(sequence_identity(test, at_090), 0.90);
    assert_eq!(stratify(&[test], &[at_030]), vec![(0.30, IdentityBin::Low)]);
    assert_eq!(stratify(&[test], &[at_090]), vec![(0.90, IdentityBin::Medium)]);
    assert_eq!(stratify(&[test], &[at_030, at_090])[0].1, IdentityBin::Medium);
    assert_eq!(stratify(&[test], &[test])[0].1, IdentityBin::High);
}

fn benchmark(n: usize) -> (Vec<BenchmarkCase>, BTreeMap<String, Pose>) {
    let mut cases = Vec::new();
    let mut preds = BTreeMap::new();
    for k in 0..n {
        let c = gen_toy_complex(700 + k as u64, 8).unwrap();
        let id = format!("case{k}");
        let shift = Vec3::new(0.5 * k as f64, 0.0, 0.0);
        preds.insert(id.clone(), c.crystal.translated(shift));
        cases.push(BenchmarkCase {
            id,
            molecule: c.molecule,
            reference: c.crystal,
            receptor: Some(c.receptor),
            pocket: Some(c.pocket),
        });
    }
    (cases, preds)
}

#[test]
fn benchmark_report_counts_successes_by_threshold() {
    let (cases, preds) = benchmark(6);
    let mut meta = BTreeMap::new();
    for (k, c) in cases.iter().enumerate() {
        meta.insert(
            c.id.clone(),
            CaseMetadata {
                family: Some(format!("f{}", k % 2)),
                identity: Some(0.2),
                identity_bin: Some(IdentityBin::Low),
            },
        );
    }
    let report = evaluate_benchmark(&preds, &cases, &meta).unwrap();
    // Shifts of 0, 0.5, ..., 2.5 Å: three within 1 Å, five within 2 Å.
    assert_eq!(report.n_cases, 6);
    assert_eq!(report.success_at_1a, 3.0 / 6.0);
    assert_eq!(report.success_at_2a, 5.0 / 6.0);
    assert_eq!(report.per_bin["low"].n, 6);
    assert_eq!(report.per_family.len(), 2);
    assert_eq!(report.schema_version, REPORT_SCHEMA_VERSION);
    let json = serde_json::to_string(&report).unwrap();
    let back: EvalReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, report);
}

#[test]
fn benchmark_rejects_unmatched_ids() {
    let (cases, mut preds) = benchmark(3);
    let pose = preds.remove("case1").unwrap();
    preds.insert("ghost".into(), pose);
    match evaluate_benchmark(&preds, &cases, &BTreeMap::new()) {
        Err(Error::Report { orphans }) => {
            assert_eq!(
                orphans,
                vec!["prediction:ghost".to_string(), "reference:case1".to_string()]
            )
        }
        other => panic!("expected orphan report, got {other:?}"),
    }
}
