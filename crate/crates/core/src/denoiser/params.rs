//! Parameter layout, size ladder, initialization and the weights file.

use super::features::{N_BOND_TYPES, N_FEATURES};
use super::schedule::{DiffusionSchedule, DEFAULT_SIGMA_MAX, DEFAULT_SIGMA_MIN};
use crate::rng::{child_rng, derive_seed};
use crate::{Error, Result};
use rand_distr::{Distribution, Normal};
use sha2::{Digest, Sha256};

pub const MIN_HIDDEN: usize = 4;
pub const MAX_HIDDEN: usize = 128;
pub const MAX_LAYERS: usize = 4;
pub const DEFAULT_TIMESTEPS: usize = 20;
/// Typical distance (Å) of ligand atoms from the pocket center, used to
/// initialize the input scales.
pub const PRIOR_SPREAD: f64 = 2.0;
const WEIGHTS_MAGIC: &[u8; 8] = b"DFWEIGHT";
const WEIGHTS_VERSION: u32 = 1;

/// Name and shape (rows × cols) of one parameter tensor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorSpec {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub offset: usize,
}

impl TensorSpec {
    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Offsets of the per-block tensors inside the flat parameter vector.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BlockOffsets {
    pub a_src: usize,
    pub a_dst: usize,
    pub a_q: usize,
    pub a_bond: usize,
    pub a_b: usize,
    pub a2_w: usize,
    pub a2_b: usize,
    pub gate_w: usize,
    pub gate_b: usize,
    pub c_lig: usize,
    pub c_poc: usize,
    pub c_q: usize,
    pub c_b: usize,
    pub cgate_w: usize,
    pub cgate_b: usize,
    pub attn_w: usize,
    pub node: Option<NodeOffsets>,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct NodeOffsets {
    pub n1_w: usize,
    pub n1_b: usize,
    pub n2_w: usize,
    pub n2_b: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct Layout {
    pub hidden: usize,
    pub w_in: usize,
    pub b_in: usize,
    pub time: usize,
    pub in_scale: usize,
    pub w_p: usize,
    pub b_p: usize,
    pub blocks: Vec<BlockOffsets>,
    pub specs: Vec<TensorSpec>,
    pub total: usize,
}

struct Cursor {
    at: usize,
    specs: Vec<TensorSpec>,
}

impl Cursor {
    fn take(&mut self, name: String, rows: usize, cols: usize) -> usize {
        let offset = self.at;
        self.specs.push(TensorSpec {
            name,
            rows,
            cols,
            offset,
        });
        self.at += rows * cols;
        offset
    }
}

impl Layout {
    pub fn new(hidden: usize, layers: usize, timesteps: usize) -> Self {
        let h = hidden;
        let mut c = Cursor {
            at: 0,
            specs: Vec::new(),
        };
        let w_in = c.take("embed.ligand.weight".into(), h, N_FEATURES);
        let b_in = c.take("embed.ligand.bias".into(), h, 1);
        let time = c.take("embed.timestep".into(), timesteps, h);
        let in_scale = c.take("embed.input_log_scale".into(), timesteps, 1);
        let w_p = c.take("embed.pocket.weight".into(), h, N_FEATURES);
        let b_p = c.take("embed.pocket.bias".into(), h, 1);
        let mut blocks = Vec::with_capacity(layers);
        for l in 0..layers {
            let mut t = |name: &str, rows, cols| c.take(format!("block{l}.{name}"), rows, cols);
            let mut b = BlockOffsets {
                a_src: t("edge.src", h, h),
                a_dst: t("edge.dst", h, h),
                a_q: t("edge.dist2", h, 1),
                a_bond: t("edge.bond", h, N_BOND_TYPES),
                a_b: t("edge.bias", h, 1),
                a2_w: t("edge.out.weight", h, h),
                a2_b: t("edge.out.bias", h, 1),
                gate_w: t("coord_gate.weight", 1, h),
                gate_b: t("coord_gate.bias", 1, 1),
                c_lig: t("cross.ligand", h, h),
                c_poc: t("cross.pocket", h, h),
                c_q: t("cross.dist2", h, 1),
                c_b: t("cross.bias", h, 1),
                cgate_w: t("cross_gate.weight", 1, h),
                cgate_b: t("cross_gate.bias", 1, 1),
                attn_w: t("cross_attention.weight", 1, h),
                node: None,
            };
            if l + 1 < layers {
                b.node = Some(NodeOffsets {
                    n1_w: t("node.hidden.weight", h, 3 * h),
                    n1_b: t("node.hidden.bias", h, 1),
                    n2_w: t("node.out.weight", h, h),
                    n2_b: t("node.out.bias", h, 1),
                });
            }
            blocks.push(b);
        }
        Layout {
            hidden,
            w_in,
            b_in,
            time,
            in_scale,
            w_p,
            b_p,
            blocks,
            total: c.at,
            specs: c.specs,
        }
    }
}

/// Closed-form parameter count for hidden width `h`, `l` blocks and `t`
/// timesteps.
pub fn parameter_count(h: usize, l: usize, t: usize) -> usize {
    let global = (2 * N_FEATURES + 2 + t) * h + t;
    let block = 5 * h * h + (8 + N_BOND_TYPES) * h + 2;
    let node = 4 * h * h + 2 * h;
    global + l * block + l.saturating_sub(1) * node
}

/// One rung of the model-size ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LadderEntry {
    pub id: u32,
    pub hidden: usize,
    pub layers: usize,
    pub n_params: usize,
}

/// Every (hidden, layers) pair with hidden in 4..=128 and layers in 1..=4,
/// sorted by parameter count (then layers). The id is the position in this
/// order.
pub fn ladder(timesteps: usize) -> Vec<LadderEntry> {
    let mut out: Vec<(usize, usize, usize)> = (MIN_HIDDEN..=MAX_HIDDEN)
        .flat_map(|h| (1..=MAX_LAYERS).map(move |l| (parameter_count(h, l, timesteps), l, h)))
        .collect();
    out.sort();
    out.into_iter()
        .enumerate()
        .map(|(id, (n_params, layers, hidden))| LadderEntry {
            id: id as u32,
            hidden,
            layers,
            n_params,
        })
        .collect()
}

/// Preferred depth for a parameter budget: 2 blocks below 5·10³, 3 below
/// 5·10⁴, 4 above.
pub fn preferred_layers(target: usize) -> usize {
    match target {
        t if t < 5_000 => 2,
        t if t < 50_000 => 3,
        _ => 4,
    }
}

/// Picks the ladder entry within 10% of `target`, closest in depth to
/// [`preferred_layers`], then closest in size.
pub fn choose_ladder_entry(target: usize, timesteps: usize) -> Result<LadderEntry> {
    if target < 1000 {
        return Err(Error::Config(format!(
            "target size {target} is below the ladder minimum of 1000"
        )));
    }
    let want = preferred_layers(target) as i64;
    ladder(timesteps)
        .into_iter()
        .filter(|e| (e.n_params as f64 - target as f64).abs() <= 0.1 * target as f64)
        .min_by_key(|e| {
            (
                (e.layers as i64 - want).abs(),
                (e.n_params as i64 - target as i64).abs(),
                e.id,
            )
        })
        .ok_or_else(|| Error::Config(format!("no ladder entry within 10% of {target} parameters")))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelWeights {
    pub hidden: usize,
    pub layers: usize,
    pub timesteps: usize,
    pub ladder_id: u32,
    pub seed: u64,
    pub params: Vec<f64>,
}

impl ModelWeights {
    /// Total scalar parameter count N.
    pub fn size(&self) -> usize {
        self.params.len()
    }

    pub(crate) fn layout(&self) -> Layout {
        Layout::new(self.hidden, self.layers, self.timesteps)
    }

    pub fn tensor_specs(&self) -> Vec<TensorSpec> {
        self.layout().specs
    }

    pub fn is_finite(&self) -> bool {
        self.params.iter().all(|p| p.is_finite())
    }

    /// Zeroes every gate on the coordinate path: the per-block gate
    /// weights and biases, and the input log-scales. The network then
    /// returns its input unchanged.
    pub fn zero_coordinate_gates(&mut self) {
        let layout = self.layout();
        let h = self.hidden;
        self.params[layout.in_scale..layout.in_scale + self.timesteps].fill(0.0);
        for b in &layout.blocks {
            for (w, bias) in [(b.gate_w, b.gate_b), (b.cgate_w, b.cgate_b)] {
                self.params[w..w + h].fill(0.0);
                self.params[bias] = 0.0;
            }
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(64 + 8 * self.params.len());
        out.extend_from_slice(WEIGHTS_MAGIC);
        out.extend_from_slice(&WEIGHTS_VERSION.to_le_bytes());
        out.extend_from_slice(&self.ladder_id.to_le_bytes());
        out.extend_from_slice(&(self.hidden as u32).to_le_bytes());
        out.extend_from_slice(&(self.layers as u32).to_le_bytes());
        out.extend_from_slice(&(self.timesteps as u32).to_le_bytes());
        out.extend_from_slice(&(self.params.len() as u64).to_le_bytes());
        out.extend_from_slice(&self.seed.to_le_bytes());
        for p in &self.params {
            out.extend_from_slice(&p.to_le_bytes());
        }
        let digest = Sha256::digest(&out);
        out.extend_from_slice(&digest);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        const HEADER: usize = 8 + 4 * 5 + 8 + 8;
        if bytes.len() < HEADER + 32 || &bytes[..8] != WEIGHTS_MAGIC {
            return Err(Error::Format("not a weights file".into()));
        }
        let (body, digest) = bytes.split_at(bytes.len() - 32);
        if Sha256::digest(body).as_slice() != digest {
            return Err(Error::Format("weights checksum mismatch".into()));
        }
        let u32_at = |o: usize| u32::from_le_bytes(body[o..o + 4].try_into().unwrap());
        let u64_at = |o: usize| u64::from_le_bytes(body[o..o + 8].try_into().unwrap());
        let version = u32_at(8);
        if version != WEIGHTS_VERSION {
            return Err(Error::Format(format!("unsupported weights version {version}")));
        }
        let ladder_id = u32_at(12);
        let hidden = u32_at(16) as usize;
        let layers = u32_at(20) as usize;
        let timesteps = u32_at(24) as usize;
        let n = u64_at(28) as usize;
        let seed = u64_at(36);
        if body.len() != HEADER + 8 * n {
            return Err(Error::Format("weights payload length mismatch".into()));
        }
        if parameter_count(hidden, layers, timesteps) != n {
            return Err(Error::Format(format!(
                "header declares {n} parameters but the architecture needs {}",
                parameter_count(hidden, layers, timesteps)
            )));
        }
        let params = body[HEADER..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let w = Self {
            hidden,
            layers,
            timesteps,
            ladder_id,
            seed,
            params,
        };
        if !w.is_finite() {
            return Err(Error::Format("weights contain non-finite values".into()));
        }
        Ok(w)
    }
}

/// Builds an explicitly shaped model. Matrices are drawn from
/// N(0, 1/fan_in), biases start at zero and the timestep table from
/// N(0, 0.1²). The input log-scales start at ln(s²/(s² + σ_t²)) with
/// s = [`PRIOR_SPREAD`] and σ_t from the default noise range, the
/// posterior-mean shrinkage for a Gaussian ligand of that spread.
pub fn init_with_shape(hidden: usize, layers: usize, timesteps: usize, seed: u64) -> Result<ModelWeights> {
    if !(1..=MAX_HIDDEN).contains(&hidden) || !(1..=MAX_LAYERS).contains(&layers) || timesteps == 0 {
        return Err(Error::Config(format!(
            "unsupported shape hidden={hidden} layers={layers} timesteps={timesteps}"
        )));
    }
    let layout = Layout::new(hidden, layers, timesteps);
    let mut params = vec![0.0; layout.total];
    let sigmas = DiffusionSchedule::linear(timesteps, DEFAULT_SIGMA_MIN, DEFAULT_SIGMA_MAX)?;
    for t in 1..=timesteps {
        let s2 = PRIOR_SPREAD * PRIOR_SPREAD;
        params[layout.in_scale + t - 1] = (s2 / (s2 + sigmas.sigma(t).powi(2))).ln();
    }
    for (k, spec) in layout.specs.iter().enumerate() {
        if spec.name.ends_with("bias") || spec.offset == layout.in_scale {
            continue;
        }
        let std = if spec.name == "embed.timestep" {
            0.1
        } else {
            (1.0 / spec.cols as f64).sqrt()
        };
        let mut rng = child_rng(derive_seed(seed, 0x1417), k as u64);
        let normal = Normal::new(0.0, std).unwrap();
        for p in &mut params[spec.offset..spec.offset + spec.len()] {
            *p = normal.sample(&mut rng);
        }
    }
    let id = ladder(timesteps)
        .iter()
        .find(|e| e.hidden == hidden && e.layers == layers)
        .map(|e| e.id)
        .unwrap_or(u32::MAX);
    Ok(ModelWeights {
        hidden,
        layers,
        timesteps,
        ladder_id: id,
        seed,
        params,
    })
}

/// Chooses a ladder shape within 10% of `target_n` and initializes it.
pub fn init_model(target_n: usize, seed: u64) -> Result<ModelWeights> {
    let entry = choose_ladder_entry(target_n, DEFAULT_TIMESTEPS)?;
    init_with_shape(entry.hidden, entry.layers, DEFAULT_TIMESTEPS, seed)
}
