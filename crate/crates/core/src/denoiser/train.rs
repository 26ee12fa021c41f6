//! x0-prediction objective, exact gradients and the Adam training loop.

use super::features::ComplexInput;
use super::model::{backward, forward, forward_traced};
use super::params::ModelWeights;
use super::schedule::{standard_normal_vec3, DiffusionSchedule};
use crate::geom::Vec3;
use crate::molio::{Molecule, Pocket, Pose, Provenance, Receptor};
use crate::rng::{rng_from_seed, Rng};
use crate::{Error, Result};
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Anything that maps noised coordinates to a clean-coordinate estimate
/// and can report the gradient of its squared error.
pub trait Denoiser: Sync {
    fn n_params(&self) -> usize;

    fn denoise(&self, input: &ComplexInput, x_t: &[Vec3], t: usize) -> Result<Vec<Vec3>>;

    /// Mean over atoms of the squared distance between the prediction
    /// and `x0`, with its gradient over parameters.
    fn loss_grad(&self, input: &ComplexInput, x_t: &[Vec3], t: usize, x0: &[Vec3]) -> Result<(f64, Vec<f64>)>;
}

fn mean_sq(pred: &[Vec3], x0: &[Vec3]) -> f64 {
    pred.iter().zip(x0).map(|(a, b)| (a - b).norm_squared()).sum::<f64>() / x0.len() as f64
}

impl Denoiser for ModelWeights {
    fn n_params(&self) -> usize {
        self.size()
    }

    fn denoise(&self, input: &ComplexInput, x_t: &[Vec3], t: usize) -> Result<Vec<Vec3>> {
        forward(self, input, x_t, t)
    }

    fn loss_grad(&self, input: &ComplexInput, x_t: &[Vec3], t: usize, x0: &[Vec3]) -> Result<(f64, Vec<f64>)> {
        let (pred, trace) = forward_traced(self, input, x_t, t)?;
        let n = x0.len() as f64;
        let g_out: Vec<Vec3> = pred.iter().zip(x0).map(|(p, x)| (p - x) * (2.0 / n)).collect();
        let mut grads = vec![0.0; self.size()];
        backward(self, input, &trace, &g_out, &mut grads);
        Ok((mean_sq(&pred, x0), grads))
    }
}

/// Test stub that always answers with known clean coordinates.
#[derive(Debug, Clone)]
pub struct PerfectPredictor {
    pub clean: Vec<Vec3>,
}

impl Denoiser for PerfectPredictor {
    fn n_params(&self) -> usize {
        0
    }

    fn denoise(&self, _: &ComplexInput, x_t: &[Vec3], _: usize) -> Result<Vec<Vec3>> {
        if x_t.len() != self.clean.len() {
            return Err(Error::Contract("atom count mismatch".into()));
        }
        Ok(self.clean.clone())
    }

    fn loss_grad(&self, _: &ComplexInput, _: &[Vec3], _: usize, x0: &[Vec3]) -> Result<(f64, Vec<f64>)> {
        Ok((mean_sq(&self.clean, x0), Vec::new()))
    }
}

/// One training complex: model input plus its reference coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainExample {
    pub id: String,
    pub input: ComplexInput,
    pub x0: Vec<Vec3>,
    pub provenance: Provenance,
}

impl TrainExample {
    pub fn new(
        id: impl Into<String>,
        receptor: &Receptor,
        pocket: &Pocket,
        mol: &Molecule,
        pose: &Pose,
    ) -> Result<Self> {
        let input = ComplexInput::new(receptor, pocket, mol)?;
        if pose.len() != input.n_ligand() {
            return Err(Error::Contract(format!(
                "pose has {} atoms but '{}' has {} heavy atoms",
                pose.len(),
                mol.name,
                input.n_ligand()
            )));
        }
        Ok(Self {
            id: id.into(),
            input,
            x0: pose.coordinates.clone(),
            provenance: pose.provenance,
        })
    }
}

/// Timestep and unit noise for one batch element.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseDraw {
    pub t: usize,
    pub eps: Vec<Vec3>,
}

/// Draws t uniform in 1..=T and ε standard normal for each example.
pub fn draw_noise(batch: &[&TrainExample], schedule: &DiffusionSchedule, rng: &mut Rng) -> Vec<NoiseDraw> {
    batch
        .iter()
        .map(|ex| {
            let t = rng.random_range(1..=schedule.steps());
            let eps = ex.x0.iter().map(|_| standard_normal_vec3(rng)).collect();
            NoiseDraw { t, eps }
        })
        .collect()
}

/// Batch loss (mean over examples of per-atom mean squared error) and its
/// gradient, for fixed noise.
pub fn loss_and_grads_with_noise<D: Denoiser>(
    model: &D,
    batch: &[&TrainExample],
    noise: &[NoiseDraw],
    schedule: &DiffusionSchedule,
) -> Result<(f64, Vec<f64>)> {
    if batch.is_empty() || batch.len() != noise.len() {
        return Err(Error::Contract(
            "batch must be nonempty and match its noise draws".into(),
        ));
    }
    let parts: Vec<Result<(f64, Vec<f64>)>> = batch
        .par_iter()
        .zip(noise.par_iter())
        .map(|(ex, nd)| {
            let sigma = schedule.sigma(nd.t);
            let x_t: Vec<Vec3> = ex.x0.iter().zip(&nd.eps).map(|(x, e)| x + e * sigma).collect();
            let (loss, grads) = model.loss_grad(&ex.input, &x_t, nd.t, &ex.x0)?;
            if !loss.is_finite() {
                return Err(Error::Training {
                    record: ex.id.clone(),
                    msg: format!("non-finite loss at t = {}", nd.t),
                });
            }
            Ok((loss, grads))
        })
        .collect();
    let b = batch.len() as f64;
    let mut loss = 0.0;
    let mut grads = vec![0.0; model.n_params()];
    for part in parts {
        let (l, g) = part?;
        loss += l;
        for (acc, gi) in grads.iter_mut().zip(&g) {
            *acc += gi;
        }
    }
    grads.iter_mut().for_each(|g| *g /= b);
    Ok((loss / b, grads))
}

pub fn loss_and_grads<D: Denoiser>(
    model: &D,
    batch: &[&TrainExample],
    schedule: &DiffusionSchedule,
    rng: &mut Rng,
) -> Result<(f64, Vec<f64>)> {
    let noise = draw_noise(batch, schedule, rng);
    loss_and_grads_with_noise(model, batch, &noise, schedule)
}

/// Average loss over `draws` noise draws per example, for monitoring.
pub fn evaluate_loss<D: Denoiser>(
    model: &D,
    data: &[TrainExample],
    schedule: &DiffusionSchedule,
    draws: usize,
    seed: u64,
) -> Result<f64> {
    let mut rng = rng_from_seed(seed);
    let batch: Vec<&TrainExample> = data.iter().cycle().take(data.len() * draws).collect();
    let noise = draw_noise(&batch, schedule, &mut rng);
    let parts: Vec<Result<f64>> = batch
        .par_iter()
        .zip(noise.par_iter())
        .map(|(ex, nd)| {
            let sigma = schedule.sigma(nd.t);
            let x_t: Vec<Vec3> = ex.x0.iter().zip(&nd.eps).map(|(x, e)| x + e * sigma).collect();
            Ok(mean_sq(&model.denoise(&ex.input, &x_t, nd.t)?, &ex.x0))
        })
        .collect();
    let mut total = 0.0;
    for p in parts {
        total += p?;
    }
    Ok(total / batch.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Pretrain,
    Finetune,
}

impl Phase {
    pub fn expected_provenance(self) -> Provenance {
        match self {
            Phase::Pretrain => Provenance::Generated,
            Phase::Finetune => Provenance::Crystal,
        }
    }
}

/// Linear warmup to `learning_rate` over `warmup_steps`, constant after.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub warmup_steps: usize,
    pub batch_size: usize,
    pub steps: usize,
    pub phase: Phase,
    pub rng_seed: u64,
    pub log_every: usize,
    pub schedule: DiffusionSchedule,
    pub data_refs: Vec<String>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 6e-3,
            warmup_steps: 100,
            batch_size: 8,
            steps: 2000,
            phase: Phase::Finetune,
            rng_seed: 0,
            log_every: 100,
            schedule: DiffusionSchedule::default(),
            data_refs: Vec::new(),
        }
    }
}

impl TrainConfig {
    pub fn rate_at(&self, step: usize) -> f64 {
        if step < self.warmup_steps {
            self.learning_rate * (step + 1) as f64 / self.warmup_steps as f64
        } else {
            self.learning_rate
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 || self.log_every == 0 {
            return Err(Error::Config("batch_size and log_every must be positive".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config("learning_rate must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossPoint {
    pub step: usize,
    /// Mean batch loss over the steps since the previous point.
    pub loss: f64,
}

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;
/// Divergence: loss above this multiple of the first step's loss ...
pub const DIVERGENCE_FACTOR: f64 = 1e3;
/// ... for this many consecutive steps.
pub const DIVERGENCE_PATIENCE: usize = 500;

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    fn new(n: usize) -> Self {
        Self {
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
        }
    }

    fn step(&mut self, params: &mut [f64], grads: &[f64], lr: f64) {
        self.t += 1;
        let c1 = 1.0 - BETA1.powi(self.t);
        let c2 = 1.0 - BETA2.powi(self.t);
        for (k, (p, g)) in params.iter_mut().zip(grads).enumerate() {
            self.m[k] = BETA1 * self.m[k] + (1.0 - BETA1) * g;
            self.v[k] = BETA2 * self.v[k] + (1.0 - BETA2) * g * g;
            *p -= lr * (self.m[k] / c1) / ((self.v[k] / c2).sqrt() + ADAM_EPS);
        }
    }
}

/// Trains with Adam on minibatches sampled with replacement.
///
/// Every example's pose provenance must match the phase: generated poses
/// for pre-training, crystal poses for fine-tuning.
pub fn train(
    weights: &ModelWeights,
    cfg: &TrainConfig,
    data: &[TrainExample],
) -> Result<(ModelWeights, Vec<LossPoint>)> {
    cfg.validate()?;
    if cfg.schedule.steps() != weights.timesteps {
        return Err(Error::Config(format!(
            "schedule has {} steps but the model embeds {} timesteps",
            cfg.schedule.steps(),
            weights.timesteps
        )));
    }
    let want = cfg.phase.expected_provenance();
    if let Some(bad) = data.iter().find(|ex| ex.provenance != want) {
        return Err(Error::Contract(format!(
            "{:?} phase needs {:?} poses but '{}' is {:?}",
            cfg.phase, want, bad.id, bad.provenance
        )));
    }
    let mut w = weights.clone();
    let mut curve = Vec::new();
    if cfg.steps == 0 {
        return Ok((w, curve));
    }
    if data.is_empty() {
        return Err(Error::Contract("training data is empty".into()));
    }
    let mut rng = rng_from_seed(cfg.rng_seed);
    let mut adam = Adam::new(w.size());
    let mut initial = None;
    let mut over = 0usize;
    let mut window = (0.0, 0usize);
    for step in 0..cfg.steps {
        let batch: Vec<&TrainExample> = (0..cfg.batch_size)
            .map(|_| &data[rng.random_range(0..data.len())])
            .collect();
        let (loss, grads) = loss_and_grads(&w, &batch, &cfg.schedule, &mut rng)?;
        let first = *initial.get_or_insert(loss);
        if loss > DIVERGENCE_FACTOR * first {
            over += 1;
            if over >= DIVERGENCE_PATIENCE {
                return Err(Error::Diverged {
                    step,
                    loss,
                    initial: first,
                });
            }
        } else {
            over = 0;
        }
        if grads.iter().any(|g| !g.is_finite()) {
            return Err(Error::Training {
                record: batch.iter().map(|ex| ex.id.as_str()).collect::<Vec<_>>().join(","),
                msg: format!("non-finite gradient at step {step}"),
            });
        }
        adam.step(&mut w.params, &grads, cfg.rate_at(step));
        window.0 += loss;
        window.1 += 1;
        if (step + 1) % cfg.log_every == 0 || step + 1 == cfg.steps {
            let point = LossPoint {
                step: step + 1,
                loss: window.0 / window.1 as f64,
            };
            log::info!("step {} loss {:.5}", point.step, point.loss);
            curve.push(point);
            window = (0.0, 0);
        }
    }
    Ok((w, curve))
}
