//! Model-size and data-size sweeps with power-law fits.
//!
//! A sweep trains one model per (grid size, repeat), optionally
//! pretraining on minidock poses before fine-tuning on crystal poses, and
//! scores each model by the mean symmetry-corrected RMSD of its top-ranked
//! prediction on held-out toy complexes. Mean RMSD per grid size is then
//! fitted to `RMSD(size) = (size / scale)^α` in log-log space.

mod fit;
mod sweep;

pub use fit::{fit_power_law, spearman, PowerLawFit};
pub use sweep::{
    build_world, held_out_rmsd, run_sweep, Axis, RunResult, SweepPoint, SweepReport, SweepSpec, SweepWorld, WorldSpec,
};
