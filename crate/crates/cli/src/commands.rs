use crate::config::ConfigFile;
use crate::error::CliError;
use crate::workspace::{self as ws, Complex};
use dockforge::datagen::{detect_pockets, gen_toy_world, generate_dataset, read_dataset_dir, write_dataset};
use dockforge::denoiser::{init_model, predict, train, LossPoint, ModelWeights, Phase, PredictConfig, TrainExample};
use dockforge::evalkit::{evaluate_benchmark, stratify, BenchmarkCase, CaseMetadata, ScreenResult};
use dockforge::minidock::{dock, SearchConfig};
use dockforge::molio::{write_pose, Pocket, Pose, Provenance};
use dockforge::rng::derive_seed;
use dockforge::scalinglab::{build_world, run_sweep, SweepSpec, WorldSpec};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub const MODEL_FILE: &str = "model.dfw";

/// What a command reports back for its manifest.
pub struct Outcome {
    pub config: serde_json::Value,
    pub seeds: BTreeMap<String, u64>,
    pub inputs: Vec<PathBuf>,
}

fn seeds(pairs: &[(&str, u64)]) -> BTreeMap<String, u64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

pub fn gen_toy(n: Option<usize>, seed: u64, out: &Path, cfg: &ConfigFile) -> Result<Outcome, CliError> {
    let n = n.unwrap_or(cfg.gen_toy.n);
    if n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let world = gen_toy_world(n, seed)?;
    let complexes: Vec<Complex> = world
        .complexes
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            let id = format!("toy_{i:04}");
            let mut receptor = c.receptor;
            receptor.name = id.clone();
            let mut molecule = c.molecule;
            molecule.name = id.clone();
            Complex {
                id,
                receptor,
                pocket: c.pocket,
                molecule,
                reference: c.crystal,
            }
        })
        .collect();
    ws::write_complex_dir(out, &complexes)?;
    log::info!("wrote {} toy complexes to {}", complexes.len(), out.display());
    println!("generated {} complexes in {}", complexes.len(), out.display());
    Ok(Outcome {
        config: json!({ "n": n }),
        seeds: seeds(&[("seed", seed)]),
        inputs: Vec::new(),
    })
}

pub struct GenDataArgs<'a> {
    pub receptors: &'a Path,
    pub ligands: &'a Path,
    pub pockets: Option<&'a Path>,
    pub pairs: Option<usize>,
}

pub fn gen_data(args: GenDataArgs, seed: u64, out: &Path, cfg: &ConfigFile) -> Result<Outcome, CliError> {
    ws::require_dir(args.receptors, "--receptors")?;
    ws::require_dir(args.ligands, "--ligands")?;
    if let Some(p) = args.pockets {
        ws::require_file(p, "--pockets")?;
    }
    let pairs = args.pairs.unwrap_or(cfg.gen_data.pairs);
    let mut receptors = ws::read_receptors(args.receptors)?;
    let ligands = ws::read_ligands(args.ligands)?;
    let known: BTreeMap<String, Pocket> = match args.pockets {
        Some(p) => ws::read_json(p)?,
        None => BTreeMap::new(),
    };
    receptors.par_iter_mut().for_each(|r| {
        r.pockets = match known.get(&r.name) {
            Some(p) => vec![p.clone()],
            None => detect_pockets(r),
        };
    });
    let used: BTreeMap<String, Vec<Pocket>> = receptors.iter().map(|r| (r.name.clone(), r.pockets.clone())).collect();
    let data = generate_dataset(&receptors, &ligands, pairs, &cfg.search, seed)?;
    std::fs::create_dir_all(out)?;
    write_dataset(out, &data, seed, &cfg.search)?;
    ws::write_json(&out.join("pockets.json"), &used)?;
    log::info!("docked {} of {} pairs", data.n_records(), pairs);
    println!(
        "{} records in {} shards, {} failed pairs",
        data.n_records(),
        data.shards.len(),
        data.failures.len()
    );
    let mut inputs = vec![args.receptors.to_path_buf(), args.ligands.to_path_buf()];
    inputs.extend(args.pockets.map(Path::to_path_buf));
    Ok(Outcome {
        config: json!({ "pairs": pairs, "search": cfg.search }),
        seeds: seeds(&[("seed", seed)]),
        inputs,
    })
}

fn load_or_init(init: Option<&Path>, model_size: usize, seed: u64) -> Result<ModelWeights, CliError> {
    match init {
        Some(p) => {
            ws::require_file(p, "--init")?;
            Ok(ModelWeights::from_bytes(&std::fs::read(p)?)?)
        }
        None => Ok(init_model(model_size, seed)?),
    }
}

fn write_training(out: &Path, weights: &ModelWeights, curve: &[LossPoint]) -> Result<(), CliError> {
    std::fs::create_dir_all(out)?;
    std::fs::write(out.join(MODEL_FILE), weights.to_bytes())?;
    let mut csv = String::from("step,loss\n");
    for p in curve {
        let _ = writeln!(csv, "{},{:.9e}", p.step, p.loss);
    }
    std::fs::write(out.join("loss.csv"), csv)?;
    if let Some(last) = curve.last() {
        println!("trained {} parameters, final loss {:.4}", weights.size(), last.loss);
    }
    Ok(())
}

pub struct TrainArgs<'a> {
    pub init: Option<&'a Path>,
    pub model_size: Option<usize>,
    pub steps: Option<usize>,
}

pub fn pretrain(
    data_dir: &Path,
    receptors_dir: &Path,
    args: TrainArgs,
    seed: u64,
    out: &Path,
    cfg: &ConfigFile,
) -> Result<Outcome, CliError> {
    ws::require_dir(data_dir, "--data")?;
    ws::require_dir(receptors_dir, "--receptors")?;
    let mut section = cfg.pretrain.clone();
    section.model_size = args.model_size.unwrap_or(section.model_size);
    section.steps = args.steps.unwrap_or(section.steps);
    let pockets: BTreeMap<String, Vec<Pocket>> = ws::read_json(&data_dir.join("pockets.json"))?;
    let receptors: BTreeMap<String, _> = ws::read_receptors(receptors_dir)?
        .into_iter()
        .map(|r| (r.name.clone(), r))
        .collect();
    let mut examples = Vec::new();
    for shard in read_dataset_dir(data_dir)? {
        for (k, rec) in shard.records.iter().enumerate() {
            let id = format!("shard{}:{k}", shard.shard_id);
            let receptor = receptors
                .get(&rec.receptor_ref)
                .ok_or_else(|| CliError::Domain(format!("{id}: receptor '{}' not found", rec.receptor_ref)))?;
            let pocket = pockets
                .get(&rec.receptor_ref)
                .and_then(|p| p.get(rec.pocket_index as usize))
                .ok_or_else(|| CliError::Domain(format!("{id}: pocket {} unknown", rec.pocket_index)))?;
            let Some(pose) = rec.poses.first() else {
                continue;
            };
            examples.push(TrainExample::new(id, receptor, pocket, &rec.molecule, pose)?);
        }
    }
    if examples.is_empty() {
        return Err(CliError::Domain(format!(
            "no training records in {}",
            data_dir.display()
        )));
    }
    let weights = load_or_init(args.init, section.model_size, seed)?;
    let train_seed = derive_seed(seed, 1);
    let tc = section.to_train_config(Phase::Pretrain, train_seed, vec![data_dir.display().to_string()]);
    log::info!(
        "pretraining {} parameters on {} records",
        weights.size(),
        examples.len()
    );
    let (trained, curve) = train(&weights, &tc, &examples)?;
    write_training(out, &trained, &curve)?;
    let mut inputs = vec![data_dir.to_path_buf(), receptors_dir.to_path_buf()];
    inputs.extend(args.init.map(Path::to_path_buf));
    Ok(Outcome {
        config: json!({ "train": tc, "model_size": section.model_size, "initialised_from": args.init }),
        seeds: seeds(&[("init", seed), ("train", train_seed)]),
        inputs,
    })
}

pub fn finetune(toy_dir: &Path, args: TrainArgs, seed: u64, out: &Path, cfg: &ConfigFile) -> Result<Outcome, CliError> {
    ws::require_dir(toy_dir, "--complexes")?;
    let mut section = cfg.finetune.clone();
    section.model_size = args.model_size.unwrap_or(section.model_size);
    section.steps = args.steps.unwrap_or(section.steps);
    let examples = ws::read_complex_dir(toy_dir)?
        .iter()
        .map(|c| TrainExample::new(c.id.clone(), &c.receptor, &c.pocket, &c.molecule, &c.reference))
        .collect::<dockforge::Result<Vec<_>>>()?;
    let weights = load_or_init(args.init, section.model_size, seed)?;
    let train_seed = derive_seed(seed, 2);
    let tc = section.to_train_config(Phase::Finetune, train_seed, vec![toy_dir.display().to_string()]);
    log::info!(
        "fine-tuning {} parameters on {} complexes",
        weights.size(),
        examples.len()
    );
    let (trained, curve) = train(&weights, &tc, &examples)?;
    write_training(out, &trained, &curve)?;
    let mut inputs = vec![toy_dir.to_path_buf()];
    inputs.extend(args.init.map(Path::to_path_buf));
    Ok(Outcome {
        config: json!({ "train": tc, "model_size": section.model_size, "initialised_from": args.init }),
        seeds: seeds(&[("init", seed), ("train", train_seed)]),
        inputs,
    })
}

fn predict_config(cfg: &ConfigFile, samples: Option<usize>) -> PredictConfig {
    let mut pc = cfg.predict.clone();
    pc.n_samples = samples.unwrap_or(pc.n_samples);
    pc
}

pub fn predict_cmd(
    model: &Path,
    toy_dir: &Path,
    samples: Option<usize>,
    seed: u64,
    out: &Path,
    cfg: &ConfigFile,
) -> Result<Outcome, CliError> {
    ws::require_file(model, "--model")?;
    ws::require_dir(toy_dir, "--complexes")?;
    let weights = ModelWeights::from_bytes(&std::fs::read(model)?)?;
    let pc = predict_config(cfg, samples);
    let complexes = ws::read_complex_dir(toy_dir)?;
    let poses_dir = out.join("poses");
    std::fs::create_dir_all(&poses_dir)?;
    let mut all: BTreeMap<String, Vec<Pose>> = BTreeMap::new();
    for (i, c) in complexes.iter().enumerate() {
        let poses = predict(
            &weights,
            &c.receptor,
            &c.pocket,
            &c.molecule,
            &pc,
            derive_seed(seed, i as u64),
        )?;
        std::fs::write(
            poses_dir.join(format!("{}.mol", c.id)),
            write_pose(&c.molecule, &poses[0])?,
        )?;
        all.insert(c.id.clone(), poses);
    }
    ws::write_json(&out.join("predictions.json"), &all)?;
    log::info!("predicted {} complexes", complexes.len());
    println!("wrote {} top poses to {}", complexes.len(), poses_dir.display());
    Ok(Outcome {
        config: json!({ "predict": pc }),
        seeds: seeds(&[("seed", seed)]),
        inputs: vec![model.to_path_buf(), toy_dir.to_path_buf()],
    })
}

pub struct EvalArgs<'a> {
    pub pred: &'a Path,
    pub reference: &'a Path,
    pub train_seqs: Option<&'a Path>,
    pub families: Option<&'a Path>,
}

pub fn eval(args: EvalArgs, out: &Path) -> Result<Outcome, CliError> {
    ws::require_dir(args.pred, "--pred")?;
    ws::require_dir(args.reference, "--ref")?;
    for (p, flag) in [(args.train_seqs, "--train-seqs"), (args.families, "--families")] {
        if let Some(p) = p {
            ws::require_file(p, flag)?;
        }
    }
    let refs = ws::read_complex_dir(args.reference)?;
    let pose_dir = if args.pred.join("poses").is_dir() {
        args.pred.join("poses")
    } else {
        args.pred.to_path_buf()
    };
    let mut predictions = BTreeMap::new();
    for path in ws::files_with_ext(&pose_dir, "mol")? {
        let mol = ws::read_ligand(&path)?;
        predictions.insert(mol.name.clone(), mol.to_pose(Provenance::Predicted));
    }
    let families: BTreeMap<String, String> = match args.families {
        Some(p) => ws::read_json(p)?,
        None => BTreeMap::new(),
    };
    let train_seqs: Vec<String> = match args.train_seqs {
        Some(p) => ws::parse_fasta(&std::fs::read_to_string(p)?)
            .into_iter()
            .map(|(_, s)| s)
            .collect(),
        None => Vec::new(),
    };
    let train_refs: Vec<&str> = train_seqs.iter().map(String::as_str).collect();
    let mut metadata = BTreeMap::new();
    for c in &refs {
        let mut meta = CaseMetadata {
            family: families.get(&c.id).cloned(),
            ..CaseMetadata::default()
        };
        if args.train_seqs.is_some() {
            let seq = c.receptor.full_sequence();
            let (identity, bin) = stratify(&[seq.as_str()], &train_refs)[0];
            meta.identity = Some(identity);
            meta.identity_bin = Some(bin);
        }
        metadata.insert(c.id.clone(), meta);
    }
    let cases: Vec<BenchmarkCase> = refs
        .into_iter()
        .map(|c| BenchmarkCase {
            id: c.id,
            molecule: c.molecule,
            reference: c.reference,
            receptor: Some(c.receptor),
            pocket: Some(c.pocket),
        })
        .collect();
    let report = evaluate_benchmark(&predictions, &cases, &metadata)?;
    std::fs::create_dir_all(out)?;
    ws::write_json(&out.join("report.json"), &report)?;
    let table = report.to_table();
    std::fs::write(out.join("report.txt"), &table)?;
    print!("{table}");
    let mut inputs = vec![args.pred.to_path_buf(), args.reference.to_path_buf()];
    inputs.extend(args.train_seqs.map(Path::to_path_buf));
    inputs.extend(args.families.map(Path::to_path_buf));
    Ok(Outcome {
        config: json!({}),
        seeds: BTreeMap::new(),
        inputs,
    })
}

pub struct ScreenArgs<'a> {
    pub receptor: &'a Path,
    pub pocket: Option<&'a Path>,
    pub ligands: &'a Path,
    pub actives: &'a Path,
    pub model: Option<&'a Path>,
}

pub fn screen(args: ScreenArgs, seed: u64, out: &Path, cfg: &ConfigFile) -> Result<Outcome, CliError> {
    ws::require_file(args.receptor, "--receptor")?;
    ws::require_dir(args.ligands, "--ligands")?;
    ws::require_file(args.actives, "--actives")?;
    let mut receptor = ws::read_receptor(args.receptor)?;
    let pocket = match args.pocket {
        Some(p) => {
            ws::require_file(p, "--pocket")?;
            ws::read_json::<Pocket>(p)?
        }
        None => detect_pockets(&receptor)
            .into_iter()
            .next()
            .ok_or_else(|| CliError::Domain(format!("no pocket detected on {}", receptor.name)))?,
    };
    receptor.pockets = vec![pocket.clone()];
    let ligands = ws::read_ligands(args.ligands)?;
    let actives: std::collections::BTreeSet<String> = std::fs::read_to_string(args.actives)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect();
    if let Some(missing) = actives.iter().find(|a| !ligands.iter().any(|l| &l.name == *a)) {
        return Err(CliError::Domain(format!(
            "active '{missing}' is not among the screened ligands"
        )));
    }
    let weights = match args.model {
        Some(p) => {
            ws::require_file(p, "--model")?;
            Some(ModelWeights::from_bytes(&std::fs::read(p)?)?)
        }
        None => None,
    };
    let scores: Vec<f64> = ligands
        .iter()
        .enumerate()
        .map(|(i, mol)| {
            let s = derive_seed(seed, i as u64);
            let poses = match &weights {
                Some(w) => predict(w, &receptor, &pocket, mol, &cfg.predict, s),
                None => dock(
                    &receptor,
                    &pocket,
                    mol,
                    &SearchConfig {
                        rng_seed: s,
                        ..cfg.search.clone()
                    },
                ),
            };
            match poses {
                Ok(p) => Ok(p[0].score),
                Err(dockforge::Error::DockingInfeasible(m)) => {
                    log::warn!("{} not docked: {m}", mol.name);
                    Ok(f64::INFINITY)
                }
                Err(e) => Err(e),
            }
        })
        .collect::<dockforge::Result<_>>()?;
    let ids: Vec<String> = ligands.iter().map(|l| l.name.clone()).collect();
    let active: Vec<bool> = ids.iter().map(|id| actives.contains(id)).collect();
    let result = ScreenResult::new(ids, scores, active, &cfg.screen.fractions)?;
    std::fs::create_dir_all(out)?;
    ws::write_json(&out.join("screen.json"), &result)?;
    let mut order: Vec<usize> = (0..result.ids.len()).collect();
    order.sort_by(|&a, &b| result.scores[a].total_cmp(&result.scores[b]));
    let mut tsv = String::from("rank\tid\tscore\tactive\n");
    for (rank, &i) in order.iter().enumerate() {
        let _ = writeln!(
            tsv,
            "{}\t{}\t{:.6}\t{}",
            rank + 1,
            result.ids[i],
            result.scores[i],
            result.active[i]
        );
    }
    std::fs::write(out.join("ranking.tsv"), tsv)?;
    for (f, ef) in &result.enrichment {
        println!("EF({:.1}%) = {ef:.3}", f * 100.0);
    }
    let mut inputs = vec![
        args.receptor.to_path_buf(),
        args.ligands.to_path_buf(),
        args.actives.to_path_buf(),
    ];
    inputs.extend(args.pocket.map(Path::to_path_buf));
    inputs.extend(args.model.map(Path::to_path_buf));
    Ok(Outcome {
        config: json!({
            "fractions": cfg.screen.fractions,
            "engine": if weights.is_some() { json!({ "predict": cfg.predict }) } else { json!({ "search": cfg.search }) },
        }),
        seeds: seeds(&[("seed", seed)]),
        inputs,
    })
}

/// Contents of a `scaling --spec` file: one toy world shared by a list of
/// sweeps.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScalingSpecFile {
    pub world: WorldSpec,
    pub sweeps: Vec<SweepSpec>,
}

pub fn scaling(spec_path: &Path, seed: Option<u64>, out: &Path) -> Result<Outcome, CliError> {
    ws::require_file(spec_path, "--spec")?;
    let mut spec: ScalingSpecFile = ws::read_json(spec_path)?;
    if spec.sweeps.is_empty() {
        return Err(CliError::Usage(format!(
            "{}: field `sweeps` is empty",
            spec_path.display()
        )));
    }
    if let Some(s) = seed {
        spec.world.seed = s;
        for sw in &mut spec.sweeps {
            sw.rng_seed = s;
        }
    }
    for (k, sw) in spec.sweeps.iter().enumerate() {
        sw.validate()
            .map_err(|e| CliError::Usage(format!("{}: sweeps[{k}]: {e}", spec_path.display())))?;
    }
    log::info!("building sweep world");
    let world = build_world(&spec.world)?;
    std::fs::create_dir_all(out)?;
    let mut summary = Vec::new();
    let mut table = String::from("sweep  axis        pretrain  alpha      resid    spearman\n");
    for (k, sw) in spec.sweeps.iter().enumerate() {
        let report = run_sweep(sw, &world, Some(&out.join(format!("sweep_{k:02}"))))?;
        let alpha = report.fit.as_ref().map(|f| f.exponent);
        let resid = report.fit.as_ref().map(|f| f.rms_residual);
        let fmt = |v: Option<f64>| v.map(|x| format!("{x:+.4}")).unwrap_or_else(|| "-".into());
        let _ = writeln!(
            table,
            "{k:<6} {:<11} {:<9} {:<10} {:<8} {}",
            format!("{:?}", sw.axis),
            sw.pretrain,
            fmt(alpha),
            fmt(resid),
            fmt(report.spearman)
        );
        summary.push(json!({
            "index": k,
            "dir": format!("sweep_{k:02}"),
            "axis": sw.axis,
            "pretrain": sw.pretrain,
            "fit": report.fit,
            "fit_error": report.fit_error,
            "spearman": report.spearman,
            "failures": report.failures,
            "points": report.points,
        }));
    }
    ws::write_json(&out.join("summary.json"), &summary)?;
    print!("{table}");
    Ok(Outcome {
        config: serde_json::to_value(&spec)?,
        seeds: seeds(&[("world", spec.world.seed)]),
        inputs: vec![spec_path.to_path_buf()],
    })
}
