//! Miniature physics docking engine: a pairwise score and a simulated
//! annealing search over rigid-body and torsional degrees of freedom.

mod score;
mod search;

pub use score::{
    score_pose, ScoreTerms, Scorer, COULOMB_CONSTANT, ELEC_CUTOFF, HBOND_MAX, HBOND_MIN, HBOND_WELL, VDW_CUTOFF,
    VDW_EPSILON,
};
pub use search::{dock, greedy_descent, perturb, Conformer, SearchConfig};
