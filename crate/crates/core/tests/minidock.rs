use dockforge::datagen::gen_toy_complex;
use dockforge::evalkit::rmsd_symm;
use dockforge::geom::{self, Vec3};
use dockforge::minidock::{dock, greedy_descent, perturb, score_pose, Conformer, ScoreTerms, SearchConfig};
use dockforge::molio::{
    perceive_topology, Atom, Bond, BondOrder, Element, Molecule, Pocket, Pose, Provenance, Receptor,
};
use dockforge::rng::rng_from_seed;
use dockforge::Error;
use proptest::prelude::*;

fn bondi(e: Element) -> f64 {
    match e {
        Element::H => 1.20,
        Element::C => 1.70,
        Element::N => 1.55,
        Element::O => 1.52,
        Element::S => 1.80,
        Element::P => 1.80,
        Element::F => 1.47,
        Element::Cl => 1.75,
        Element::Br => 1.85,
        Element::I => 1.98,
    }
}

/// Plain double loop over every ligand/receptor heavy pair.
fn oracle_score(receptor: &Receptor, pocket: &Pocket, mol: &Molecule, pose: &Pose) -> ScoreTerms {
    let lig: Vec<&Atom> = mol.atoms.iter().filter(|a| a.element != Element::H).collect();
    let mut t = ScoreTerms::default();
    for (atom, x) in lig.iter().zip(&pose.coordinates) {
        for ra in receptor
            .atoms
            .iter()
            .map(|a| &a.atom)
            .filter(|a| a.element != Element::H)
        {
            let r = (x - ra.position).norm();
            if r < 8.0 {
                let sigma = (bondi(atom.element) + bondi(ra.element)) / 2f64.powf(1.0 / 6.0);
                let q = (sigma / r).powi(6);
                t.vdw += 0.8 * (q * q - q);
            }
            if r < 12.0 {
                t.electrostatic += 332.0 * atom.formal_charge as f64 * ra.formal_charge as f64 / (4.0 * r * r);
            }
            let pair = (atom.is_hbond_donor && ra.is_hbond_acceptor) || (atom.is_hbond_acceptor && ra.is_hbond_donor);
            if pair && (2.6..=3.4).contains(&r) {
                t.hbond -= 1.0;
            }
        }
        let out = ((x - pocket.center).norm() - pocket.radius).max(0.0);
        t.pocket_confinement += out * out;
    }
    t.total = t.vdw + t.electrostatic + t.hbond + t.pocket_confinement;
    t
}

fn butane() -> Molecule {
    let pos = [
        Vec3::new(0.0, 0.0, 0.0),
        Vec3::new(1.53, 0.0, 0.0),
        Vec3::new(2.04, 1.44, 0.0),
        Vec3::new(3.57, 1.44, 0.0),
    ];
    let mol = Molecule {
        name: "butane".into(),
        atoms: pos.iter().map(|p| Atom::new(Element::C, *p)).collect(),
        bonds: (0..3)
            .map(|i| Bond {
                a: i,
                b: i + 1,
                order: BondOrder::Single,
            })
            .collect(),
        rings: vec![],
        rotatable_bonds: vec![],
    };
    perceive_topology(&mol).unwrap()
}

fn pairwise(coords: &[Vec3]) -> Vec<f64> {
    let mut out = Vec::new();
    for i in 0..coords.len() {
        for j in i + 1..coords.len() {
            out.push((coords[i] - coords[j]).norm());
        }
    }
    out
}

#[test]
fn planted_pose_matches_double_loop_oracle() {
    for seed in [1, 7, 42] {
        let c = gen_toy_complex(seed, 12).unwrap();
        let fast = score_pose(&c.receptor, &c.pocket, &c.molecule, &c.crystal);
        let slow = oracle_score(&c.receptor, &c.pocket, &c.molecule, &c.crystal);
        for (a, b) in [
            (fast.vdw, slow.vdw),
            (fast.electrostatic, slow.electrostatic),
            (fast.hbond, slow.hbond),
            (fast.pocket_confinement, slow.pocket_confinement),
            (fast.total, slow.total),
        ] {
            assert!((a - b).abs() <= 1e-9, "seed {seed}: {a} vs {b}");
        }
        assert!(slow.hbond < 0.0, "toy pockets always offer hydrogen bonds");
    }
}

#[test]
fn far_away_ligand_only_pays_confinement() {
    let c = gen_toy_complex(3, 9).unwrap();
    let away = c.crystal.translated(Vec3::new(50.0 + c.pocket.radius, 0.0, 0.0));
    let t = score_pose(&c.receptor, &c.pocket, &c.molecule, &away);
    assert!(t.vdw.abs() < 1e-6);
    assert!(t.electrostatic.abs() < 1e-6);
    assert_eq!(t.hbond, 0.0);
    assert!(t.pocket_confinement > 0.0);
    assert_eq!(t.total, t.vdw + t.electrostatic + t.hbond + t.pocket_confinement);
}

#[test]
fn score_invariant_under_joint_rigid_motion() {
    let c = gen_toy_complex(11, 10).unwrap();
    let base = score_pose(&c.receptor, &c.pocket, &c.molecule, &c.crystal).total;
    let mut rng = rng_from_seed(5);
    for _ in 0..5 {
        let rot = geom::random_rotation(&mut rng);
        let shift = geom::random_in_ball(&mut rng, 30.0);
        let moved = |p: &Vec3| rot * p + shift;
        let mut receptor = c.receptor.clone();
        for a in receptor.atoms.iter_mut() {
            a.atom.position = moved(&a.atom.position);
        }
        let pocket = Pocket {
            center: moved(&c.pocket.center),
            ..c.pocket.clone()
        };
        let pose = Pose::new(c.crystal.coordinates.iter().map(moved).collect(), Provenance::Crystal);
        let s = score_pose(&receptor, &pocket, &c.molecule, &pose).total;
        assert!((s - base).abs() <= 1e-9 * base.abs().max(1.0), "{s} vs {base}");
    }
}

#[test]
fn zero_steps_leave_pose_bitwise_unchanged() {
    let mol = butane();
    let pose = mol.to_pose(Provenance::Generated);
    let cfg = SearchConfig {
        translation_step: 0.0,
        rotation_step: 0.0,
        torsion_step: 0.0,
        ..SearchConfig::default()
    };
    let mut rng = rng_from_seed(0);
    assert_eq!(perturb(&pose, &mol, &cfg, &mut rng), pose);
}

#[test]
fn butane_twist_moves_only_one_end() {
    let mol = butane();
    let conf = Conformer::new(&mol);
    assert_eq!(conf.n_torsions(), 1);
    let mut coords = mol.heavy_positions();
    let before = coords.clone();
    conf.twist(&mut coords, 0, std::f64::consts::PI);
    let moving = conf.moving_atoms(0).to_vec();
    assert_eq!(moving.len(), 2, "either ethyl half may rotate");
    for i in 0..4 {
        if !moving.contains(&i) {
            assert_eq!(coords[i], before[i]);
        }
    }
    // anti -> syn shortens the C1-C4 distance (hand geometry).
    let d0 = (before[0] - before[3]).norm();
    let d1 = (coords[0] - coords[3]).norm();
    assert!(d1 < d0 - 0.5, "{d0} -> {d1}");
    // Bond lengths are preserved by the twist.
    for k in 0..3 {
        assert!(((coords[k] - coords[k + 1]).norm() - (before[k] - before[k + 1]).norm()).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rigid_only_perturbation_is_an_isometry(seed in any::<u64>(), t in 0.0f64..3.0, r in 0.0f64..3.0) {
        let c = gen_toy_complex(seed % 8, 10).unwrap();
        let cfg = SearchConfig { translation_step: t, rotation_step: r, torsion_step: 0.0, ..SearchConfig::default() };
        let mut rng = rng_from_seed(seed);
        let out = perturb(&c.crystal, &c.molecule, &cfg, &mut rng);
        for (a, b) in pairwise(&c.crystal.coordinates).iter().zip(pairwise(&out.coordinates)) {
            prop_assert!((a - b).abs() <= 1e-9);
        }
    }

    #[test]
    fn torsion_moves_keep_bond_lengths(seed in any::<u64>()) {
        let c = gen_toy_complex(seed % 8, 14).unwrap();
        let cfg = SearchConfig { translation_step: 0.0, rotation_step: 0.0, torsion_step: 3.0, ..SearchConfig::default() };
        let mut rng = rng_from_seed(seed);
        let out = perturb(&c.crystal, &c.molecule, &cfg, &mut rng);
        let heavy = c.molecule.heavy_indices();
        let slot = |atom: usize| heavy.iter().position(|&h| h == atom);
        for b in &c.molecule.bonds {
            if let (Some(i), Some(j)) = (slot(b.a), slot(b.b)) {
                let before = (c.crystal.coordinates[i] - c.crystal.coordinates[j]).norm();
                let after = (out.coordinates[i] - out.coordinates[j]).norm();
                prop_assert!((before - after).abs() <= 1e-9);
            }
        }
    }
}

#[test]
fn dock_returns_sorted_rescorable_distinct_poses() {
    let c = gen_toy_complex(21, 11).unwrap();
    let cfg = SearchConfig {
        n_restarts: 16,
        n_steps: 600,
        top_k: 4,
        rng_seed: 9,
        ..SearchConfig::default()
    };
    let poses = dock(&c.receptor, &c.pocket, &c.molecule, &cfg).unwrap();
    assert!(!poses.is_empty() && poses.len() <= 4);
    for w in poses.windows(2) {
        assert!(w[0].score <= w[1].score);
        assert!(dockforge::evalkit::rmsd(&w[0], &w[1]).unwrap() >= 0.5);
    }
    for p in &poses {
        assert_eq!(p.provenance, Provenance::Generated);
        let s = score_pose(&c.receptor, &c.pocket, &c.molecule, p).total;
        assert!((s - p.score).abs() <= 1e-9 * s.abs().max(1.0));
    }
    assert_eq!(poses, dock(&c.receptor, &c.pocket, &c.molecule, &cfg).unwrap());
}

#[test]
fn dock_is_independent_of_thread_count() {
    let c = gen_toy_complex(5, 8).unwrap();
    let cfg = SearchConfig {
        n_restarts: 8,
        n_steps: 300,
        top_k: 3,
        rng_seed: 77,
        ..SearchConfig::default()
    };
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let a = single.install(|| dock(&c.receptor, &c.pocket, &c.molecule, &cfg).unwrap());
    let b = dock(&c.receptor, &c.pocket, &c.molecule, &cfg).unwrap();
    assert_eq!(a, b);
}

#[test]
fn oversized_ligand_is_infeasible() {
    let c = gen_toy_complex(2, 16).unwrap();
    let tiny = Pocket {
        radius: 1.0,
        ..c.pocket.clone()
    };
    let err = dock(&c.receptor, &tiny, &c.molecule, &SearchConfig::default()).unwrap_err();
    assert!(matches!(err, Error::DockingInfeasible(_)));
}

#[test]
fn invalid_config_is_rejected() {
    let c = gen_toy_complex(2, 6).unwrap();
    for cfg in [
        SearchConfig {
            n_restarts: 0,
            ..SearchConfig::default()
        },
        SearchConfig {
            temperature_start: 0.01,
            temperature_end: 0.1,
            ..SearchConfig::default()
        },
        SearchConfig {
            temperature_end: 0.0,
            ..SearchConfig::default()
        },
    ] {
        assert!(matches!(
            dock(&c.receptor, &c.pocket, &c.molecule, &cfg),
            Err(Error::Config(_))
        ));
    }
}

#[test]
fn greedy_descent_never_worsens() {
    let c = gen_toy_complex(8, 10).unwrap();
    let mut rng = rng_from_seed(1);
    let cfg = SearchConfig::default();
    for _ in 0..4 {
        let start = perturb(&c.crystal, &c.molecule, &cfg, &mut rng);
        let s0 = score_pose(&c.receptor, &c.pocket, &c.molecule, &start).total;
        let end = greedy_descent(&c.receptor, &c.pocket, &c.molecule, &start, &cfg, 200);
        assert!(end.score <= s0);
    }
}

#[test]
fn planted_poses_are_recovered_on_a_small_sample() {
    let mut hits = 0;
    for seed in 100..110u64 {
        let c = gen_toy_complex(seed, 6 + (seed as usize % 11)).unwrap();
        let cfg = SearchConfig {
            rng_seed: seed,
            ..SearchConfig::default()
        };
        let best = &dock(&c.receptor, &c.pocket, &c.molecule, &cfg).unwrap()[0];
        if rmsd_symm(&c.molecule, &c.crystal, best).unwrap().rmsd <= 1.0 {
            hits += 1;
        }
    }
    assert!(hits >= 7, "recovered {hits}/10");
}
