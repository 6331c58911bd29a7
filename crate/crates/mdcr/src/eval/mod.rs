//! Evaluation: gauge-invariant scores, enumeration utilities, counterexample
//! generators, and the trial/sweep harness.

pub mod counterexamples;

mod bounds;
mod gaussian;
mod perms;
mod scores;
mod sweep;
mod trial;

pub use bounds::{bound_table, BoundRow};
pub use gaussian::{gaussian_counterexample, psd_cholesky, GaussianError};
pub use perms::{
    apply_right, block_signed_perm_match, linear_extensions, permutations, position_map,
    signed_permutations, PermError, SignedPerm,
};
pub use scores::{score_a, score_a_detailed, score_b, ScoreError, ENUMERATION_CAP};
pub use sweep::{
    aggregate, run_cell_trial, run_sweep, run_sweep_subset, CellAggregate, SweepConfig,
    SweepResults, TrialRow,
};
pub use trial::{
    run_empirical_pipeline, run_oracle_pipeline, run_trial, PipelineOutput, PipelineParams,
    Stage, StageFailure, TrialConfig, TrialResult,
};
