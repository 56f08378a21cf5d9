//! Exact finite-domain structural causal models.
//!
//! Models are random or loaded from JSON; inference is exact (variable
//! elimination over dense tables) and guarded by a cell limit.

mod counterfactual;
mod dist;
pub(crate) mod factor;
mod infer;
mod model;
mod oracle;

pub use counterfactual::{counterfactual_joint, Term};
pub use dist::{all_assignments, Assignment, Dist, NORMALIZATION_TOL};
pub use factor::MAX_CELLS;
pub use infer::{adjustment_estimand, interventional, joint_observed};
pub use model::{latent_name, random_scm, DiscreteScm};
pub use oracle::{
    adjustment_gap, search_counterexample, verify_soundness, Counterexample, Gap, SoundnessReport,
    TrialRecord, ORACLE_DOMAIN, ORACLE_EPS,
};
