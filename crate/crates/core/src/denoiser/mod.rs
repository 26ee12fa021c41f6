//! Equivariant coordinate denoiser trained by x0-prediction.
//!
//! # Architecture
//!
//! Inputs are the ligand heavy atoms (features `f_i`, coordinates `x_i`),
//! the [`POCKET_CONTEXT`] receptor heavy atoms nearest the pocket center
//! (features `f_j`, fixed coordinates `y_j`) and a timestep `t`. All
//! coordinates are first shifted so the pocket center `c` is the origin,
//! and the noised ligand is then shrunk toward it by a learned
//! per-timestep factor:
//!
//! ```text
//! x_i = exp(κ_t) (x_i − c)              y_j = y_j − c
//! h_i = W_in f_i + b_in + E[t]          g_j = W_p f_j + b_p
//! s(d) = ½(cos(π d / 10) + 1)  for d < 10 Å, else 0
//! ```
//!
//! Each block, for ligand pairs i ≠ j with d_ij = |x_i − x_j| < 10 Å and
//! q_ij = d_ij² / 100:
//!
//! ```text
//! m_ij  = silu(A2 · silu(A_src h_i + A_dst h_j + a_q q_ij + A_bond[type_ij] + a_b) + a2)
//! φ_ij  = w_gate · m_ij + b_gate
//! M_i   = Σ_j s(d_ij) m_ij / 8
//! ```
//!
//! and for ligand–pocket pairs with d'_ij = |x_i − y_j| < 10 Å:
//!
//! ```text
//! m'_ij = silu(C_lig h_i + C_poc g_j + c_q q'_ij + c_b)
//! ψ_ij  = w_cgate · m'_ij + b_cgate
//! α_ij  = s(d'_ij) exp(w_attn · m'_ij) / Σ_k s(d'_ik) exp(w_attn · m'_ik)
//! P_i   = Σ_j α_ij m'_ij
//! ```
//!
//! Coordinates update synchronously; pocket atoms never move:
//!
//! ```text
//! x_i ← x_i + Σ_j (x_i − x_j) φ_ij s(d_ij) / ((d_ij + 1) · 8)
//!           + Σ_j (x_i − y_j) ψ_ij s(d'_ij) / ((d'_ij + 1) · 32)
//! h_i ← h_i + N2 silu(N1 [h_i, M_i, P_i] + n1) + n2      (all but the last block)
//! ```
//!
//! The output is the final ligand coordinates shifted back by `c`. Every
//! coordinate enters only through differences and distances, so the map
//! commutes with rotations, reflections and translations applied jointly
//! to ligand and pocket.

mod features;
mod model;
mod params;
mod predict;
mod schedule;
mod train;

pub use features::{atom_features, ComplexInput, Features, N_BOND_TYPES, N_FEATURES, POCKET_CONTEXT};
pub use model::{forward, forward_denoise, CUTOFF, DIST2_SCALE, LIGAND_NORM, POCKET_NORM};
pub use params::{
    choose_ladder_entry, init_model, init_with_shape, ladder, parameter_count, preferred_layers, LadderEntry,
    ModelWeights, TensorSpec, DEFAULT_TIMESTEPS, MAX_HIDDEN, MAX_LAYERS, MIN_HIDDEN, PRIOR_SPREAD,
};
pub use predict::{predict, reverse_process, reverse_timesteps, PredictConfig, Ranking, VALIDITY_PENALTY};
pub use schedule::{noise_coords, standard_normal_vec3, DiffusionSchedule, DEFAULT_SIGMA_MAX, DEFAULT_SIGMA_MIN};
pub use train::{
    draw_noise, evaluate_loss, loss_and_grads, loss_and_grads_with_noise, train, Denoiser, LossPoint, NoiseDraw,
    PerfectPredictor, Phase, TrainConfig, TrainExample, DIVERGENCE_FACTOR, DIVERGENCE_PATIENCE,
};
