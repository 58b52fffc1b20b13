//! ℱ-sequences as rules, empirical spreading-model and joint-model
//! extraction, join constructions, and subordination and suppression checks.

mod extract;
mod grid;
mod join;
mod rule;
mod verify;

pub use extract::{
    check_joint_stability, extract_joint, extract_sm, extract_with, joint_rule_index, spreading_check, Cell,
    Cutoff, EstimateMeta, SMEstimate, SpreadingReport,
};
pub use grid::{to_scalars, Coeffs, Grid, RANDOM_POINTS};
pub use join::{
    build_join, build_weighted_join, join_estimates, JoinAudit, JoinResult, KBounds, WeightedJoinResult,
    INTERLEAVING_CHECK_L,
};
pub use rule::{Certificate, DeltaRule, FSeqRule, RuleKind, TableRule};
pub use verify::{
    check_suppression, subordination_check, CoordReport, CoordStatus, LimitEntry, SubordinationReport,
    SuppressionReport, SuppressionViolation,
};
