use super::fit::{fit_power_law, spearman, PowerLawFit};
use crate::datagen::{gen_toy_world, ToyComplex};
use crate::denoiser::{
    init_model, predict, train, ModelWeights, Phase, PredictConfig, Ranking, TrainConfig, TrainExample,
};
use crate::evalkit::rmsd_symm;
use crate::minidock::{dock, SearchConfig};
use crate::rng::derive_seed;
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

/// Sizes of the three disjoint splits of a sweep world.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorldSpec {
    /// Complexes docked with minidock to provide generated poses.
    pub n_pretrain: usize,
    /// Complexes whose crystal poses are used for fine-tuning.
    pub n_finetune: usize,
    /// Held-out complexes, never trained on.
    pub n_test: usize,
    pub seed: u64,
    pub dock: SearchConfig,
}

impl Default for WorldSpec {
    fn default() -> Self {
        Self {
            n_pretrain: 10_000,
            n_finetune: 200,
            n_test: 64,
            seed: 0,
            dock: SearchConfig {
                n_restarts: 8,
                n_steps: 500,
                ..SearchConfig::default()
            },
        }
    }
}

pub struct SweepWorld {
    pub pretrain: Vec<TrainExample>,
    pub finetune: Vec<TrainExample>,
    pub test: Vec<ToyComplex>,
    /// Pretraining complexes minidock could not dock.
    pub dock_failures: usize,
}

/// Generates one toy world and splits it into test, fine-tune and
/// pretrain complexes, in that order. Pretraining examples carry the top
/// minidock pose rather than the crystal.
pub fn build_world(spec: &WorldSpec) -> Result<SweepWorld> {
    let total = spec.n_test + spec.n_finetune + spec.n_pretrain;
    let world = gen_toy_world(total, spec.seed)?;
    let mut complexes = world.complexes.into_iter();
    let test: Vec<ToyComplex> = complexes.by_ref().take(spec.n_test).collect();
    let finetune = complexes
        .by_ref()
        .take(spec.n_finetune)
        .map(|c| TrainExample::new(c.molecule.name.clone(), &c.receptor, &c.pocket, &c.molecule, &c.crystal))
        .collect::<Result<Vec<_>>>()?;
    let rest: Vec<ToyComplex> = complexes.collect();
    let docked: Vec<Option<TrainExample>> = rest
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let cfg = SearchConfig {
                rng_seed: derive_seed(spec.seed ^ 0xd0c4, i as u64),
                top_k: 1,
                ..spec.dock.clone()
            };
            let pose = dock(&c.receptor, &c.pocket, &c.molecule, &cfg)
                .ok()?
                .into_iter()
                .next()?;
            TrainExample::new(c.molecule.name.clone(), &c.receptor, &c.pocket, &c.molecule, &pose).ok()
        })
        .collect();
    let dock_failures = docked.iter().filter(|d| d.is_none()).count();
    Ok(SweepWorld {
        pretrain: docked.into_iter().flatten().collect(),
        finetune,
        test,
        dock_failures,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    ModelSize,
    DataSize,
}

impl Axis {
    fn label(self) -> &'static str {
        match self {
            Axis::ModelSize => "model",
            Axis::DataSize => "data",
        }
    }
}

/// One sweep along a single axis.
///
/// The data size D is the number of pretraining examples when `pretrain`
/// is set, otherwise the number of fine-tuning examples. `fixed` holds the
/// value of the axis not being swept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: Axis,
    pub grid: Vec<usize>,
    pub fixed: usize,
    pub pretrain: bool,
    /// Steps of the first training phase: pretraining, or fine-tuning
    /// when pretraining is off.
    pub train_steps: usize,
    /// Fine-tuning steps after pretraining. Runs without pretraining
    /// fine-tune for `train_steps + finetune_steps`, so both arms get the
    /// same number of updates.
    pub finetune_steps: usize,
    pub repeats: usize,
    pub rng_seed: u64,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub eval_samples: usize,
    pub eval_refine_iters: usize,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            axis: Axis::DataSize,
            grid: vec![100, 300, 1_000, 3_000, 10_000],
            fixed: 10_000,
            pretrain: true,
            train_steps: 1_500,
            finetune_steps: 300,
            repeats: 3,
            rng_seed: 0,
            batch_size: 8,
            learning_rate: 6e-3,
            eval_samples: 4,
            eval_refine_iters: 10,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.grid.len() < 3 || self.grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(
                "grid must be strictly increasing with at least 3 sizes".into(),
            ));
        }
        if self.repeats == 0 || self.train_steps == 0 || self.eval_samples == 0 || self.eval_refine_iters == 0 {
            return Err(Error::Config(
                "repeats, train_steps, eval_samples and eval_refine_iters must be positive".into(),
            ));
        }
        Ok(())
    }

    fn shape(&self, size: usize) -> (usize, usize) {
        match self.axis {
            Axis::ModelSize => (size, self.fixed),
            Axis::DataSize => (self.fixed, size),
        }
    }

    fn run_label(&self, size: usize, repeat: usize) -> String {
        let pre = if self.pretrain { "pre" } else { "nopre" };
        format!("{}-{size}-{pre}-r{repeat}", self.axis.label())
    }
}

/// Outcome of one (grid size, repeat) run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub label: String,
    pub size: usize,
    pub repeat: usize,
    pub n_params: usize,
    pub data_size: usize,
    pub pretrain: bool,
    pub mean_rmsd: Option<f64>,
    pub final_loss: Option<f64>,
    pub error: Option<String>,
}

/// Repeats of one grid size, aggregated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub size: usize,
    pub n_params: usize,
    pub data_size: usize,
    pub mean_rmsd: Option<f64>,
    pub std_rmsd: Option<f64>,
    pub completed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub spec: SweepSpec,
    pub points: Vec<SweepPoint>,
    pub fit: Option<PowerLawFit>,
    pub fit_error: Option<String>,
    /// Rank correlation between size and mean RMSD over completed points.
    pub spearman: Option<f64>,
    pub failures: Vec<String>,
    pub runs: Vec<RunResult>,
}

impl SweepReport {
    /// `size,n_params,data_size,mean_rmsd,std_rmsd` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("size,n_params,data_size,mean_rmsd,std_rmsd\n");
        for p in &self.points {
            let f = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                p.size,
                p.n_params,
                p.data_size,
                f(p.mean_rmsd),
                f(p.std_rmsd)
            );
        }
        out
    }
}

/// Mean symmetry-corrected RMSD of the top-ranked prediction over the
/// held-out complexes.
pub fn held_out_rmsd(weights: &ModelWeights, test: &[ToyComplex], cfg: &PredictConfig, seed: u64) -> Result<Vec<f64>> {
    test.par_iter()
        .enumerate()
        .map(|(i, c)| {
            let poses = predict(
                weights,
                &c.receptor,
                &c.pocket,
                &c.molecule,
                cfg,
                derive_seed(seed, i as u64),
            )?;
            Ok(rmsd_symm(&c.molecule, &c.crystal, &poses[0])?.rmsd)
        })
        .collect()
}

fn phase_config(spec: &SweepSpec, phase: Phase, steps: usize, seed: u64) -> TrainConfig {
    TrainConfig {
        learning_rate: spec.learning_rate,
        batch_size: spec.batch_size,
        steps,
        phase,
        rng_seed: seed,
        ..TrainConfig::default()
    }
}

fn execute(spec: &SweepSpec, world: &SweepWorld, size: usize, repeat: usize) -> Result<RunResult> {
    let (n_target, d) = spec.shape(size);
    let init_seed = derive_seed(spec.rng_seed, repeat as u64);
    let mut w = init_model(n_target, init_seed)?;
    let mut result = RunResult {
        label: spec.run_label(size, repeat),
        size,
        repeat,
        n_params: w.size(),
        data_size: d,
        pretrain: spec.pretrain,
        mean_rmsd: None,
        final_loss: None,
        error: None,
    };
    let pool = if spec.pretrain {
        &world.pretrain
    } else {
        &world.finetune
    };
    if d > pool.len() || d == 0 {
        return Err(Error::Config(format!(
            "data size {d} outside 1..={} available examples",
            pool.len()
        )));
    }
    let phases: Vec<(Phase, &[TrainExample], usize, u64)> = if spec.pretrain {
        vec![
            (Phase::Pretrain, &world.pretrain[..d], spec.train_steps, 1),
            (Phase::Finetune, &world.finetune[..], spec.finetune_steps, 2),
        ]
    } else {
        vec![(
            Phase::Finetune,
            &world.finetune[..d],
            spec.train_steps + spec.finetune_steps,
            2,
        )]
    };
    for (phase, data, steps, stream) in phases {
        if steps == 0 {
            continue;
        }
        match train(
            &w,
            &phase_config(spec, phase, steps, derive_seed(init_seed, stream)),
            data,
        ) {
            Ok((trained, curve)) => {
                w = trained;
                result.final_loss = curve.last().map(|p| p.loss);
            }
            Err(e @ (Error::Diverged { .. } | Error::Training { .. })) => {
                result.error = Some(e.to_string());
                return Ok(result);
            }
            Err(e) => return Err(e),
        }
    }
    let cfg = PredictConfig {
        n_samples: spec.eval_samples,
        refine_iters: spec.eval_refine_iters,
        ranking: Ranking::PhysicsScorePlusValidity,
        ..PredictConfig::default()
    };
    let rmsds = held_out_rmsd(&w, &world.test, &cfg, derive_seed(spec.rng_seed, 0xe7a1))?;
    result.mean_rmsd = Some(rmsds.iter().sum::<f64>() / rmsds.len().max(1) as f64);
    Ok(result)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Runs every (size, repeat) job, fits the power law over completed
/// points and, with `out_dir`, writes `sweep.json` and `sweep.csv`.
///
/// Each finished job is stored under `out_dir/runs/`; a rerun reuses those
/// files, so an interrupted sweep resumes where it stopped and produces
/// the same report.
pub fn run_sweep(spec: &SweepSpec, world: &SweepWorld, out_dir: Option<&Path>) -> Result<SweepReport> {
    spec.validate()?;
    if world.test.is_empty() {
        return Err(Error::Config("sweep world has no held-out complexes".into()));
    }
    let runs_dir = out_dir.map(|d| d.join("runs"));
    if let Some(dir) = &runs_dir {
        std::fs::create_dir_all(dir)?;
    }
    let jobs: Vec<(usize, usize)> = spec
        .grid
        .iter()
        .flat_map(|&s| (0..spec.repeats).map(move |r| (s, r)))
        .collect();
    let runs = jobs
        .par_iter()
        .map(|&(size, repeat)| {
            let path = runs_dir
                .as_ref()
                .map(|d| d.join(format!("{}.json", spec.run_label(size, repeat))));
            if let Some(p) = path.as_ref().filter(|p| p.exists()) {
                let done: RunResult = serde_json::from_slice(&std::fs::read(p)?)?;
                return Ok(done);
            }
            let result = execute(spec, world, size, repeat)?;
            log::info!("{} rmsd {:?} error {:?}", result.label, result.mean_rmsd, result.error);
            if let Some(p) = path {
                write_atomic(&p, &serde_json::to_vec_pretty(&result)?)?;
            }
            Ok(result)
        })
        .collect::<Result<Vec<RunResult>>>()?;

    let mut points = Vec::new();
    let mut failures = Vec::new();
    for (k, &size) in spec.grid.iter().enumerate() {
        let group = &runs[k * spec.repeats..(k + 1) * spec.repeats];
        let ok: Vec<f64> = group.iter().filter_map(|r| r.mean_rmsd).collect();
        failures.extend(
            group
                .iter()
                .filter_map(|r| r.error.as_ref().map(|e| format!("{}: {e}", r.label))),
        );
        let mean = (!ok.is_empty()).then(|| ok.iter().sum::<f64>() / ok.len() as f64);
        let std = mean.map(|m| (ok.iter().map(|v| (v - m).powi(2)).sum::<f64>() / ok.len() as f64).sqrt());
        points.push(SweepPoint {
            size,
            n_params: group[0].n_params,
            data_size: group[0].data_size,
            mean_rmsd: mean,
            std_rmsd: std,
            completed: ok.len(),
            failed: group.len() - ok.len(),
        });
    }
    let fit_points: Vec<(f64, f64)> = points
        .iter()
        .filter_map(|p| {
            let x = match spec.axis {
                Axis::ModelSize => p.n_params,
                Axis::DataSize => p.data_size,
            };
            p.mean_rmsd.map(|m| (x as f64, m))
        })
        .collect();
    let (fit, fit_error) = match fit_power_law(&fit_points) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let (xs, ys): (Vec<f64>, Vec<f64>) = fit_points.iter().copied().unzip();
    let report = SweepReport {
        spec: spec.clone(),
        points,
        fit,
        fit_error,
        spearman: spearman(&xs, &ys),
        failures,
        runs,
    };
    if let Some(dir) = out_dir {
        write_atomic(&dir.join("sweep.json"), &serde_json::to_vec_pretty(&report)?)?;
        write_atomic(&dir.join("sweep.csv"), report.to_csv().as_bytes())?;
    }
    Ok(report)
}
