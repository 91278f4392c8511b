//! Reproduction harness: the block test system, the reachable-space
//! experiment, and the convergence and recovery studies.

mod config;
mod reachable;
mod studies;
mod system;

pub use config::{ExperimentConfig, TransformChoice};
pub use reachable::{
    ensure_passed, run_reachable_experiment, write_reachable_outputs, Check, ReachableReport,
    ReachableSummary, ReachableTrajectories, GAP_MIN, MATCH_TOL, ZERO_TOL,
};
pub use studies::{
    run_convergence_study, run_recovery_study, write_recovery_csv, ConvergenceRow,
    ConvergenceTable, RecoveryRow,
};
pub use system::{build_block_system, seeded_dense_system, BlockSystem};
