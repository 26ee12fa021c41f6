//! Desk-scale protein-ligand pose generation and evaluation.
//!
//! The crate is organised as a pipeline:
//!
//! - [`molio`] parses ligand connection tables and fixed-column receptor
//!   files and derives ligand topology.
//! - [`minidock`] is a small physics docking engine (pairwise score plus
//!   simulated-annealing search) used to generate training poses.
//! - [`datagen`] detects pockets, clusters receptors by sequence, samples
//!   receptor-ligand pairs and writes dataset shards. It also builds
//!   synthetic complexes with a planted binding pose.
//! - [`denoiser`] is an E(3)-equivariant coordinate denoiser trained by
//!   x0-prediction, with hand-written backpropagation.
//! - [`evalkit`] holds RMSD, validity checks, sequence identity, enrichment
//!   and benchmark reporting.
//! - [`scalinglab`] runs model/data-size sweeps and fits power laws.

pub mod datagen;
pub mod denoiser;
pub mod error;
pub mod evalkit;
pub mod geom;
pub mod minidock;
pub mod molio;
pub mod rng;
pub mod scalinglab;

pub use error::{Error, Result};

/// Version string recorded in shard metadata, weights files and manifests.
pub const TOOL_VERSION: &str = concat!("dockforge/", env!("CARGO_PKG_VERSION"));
