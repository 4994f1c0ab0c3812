//! Seeded Monte Carlo campaigns and the deterministic checks behind the
//! command-line tool.
//!
//! Every decoder of a campaign sees the same sampled syndrome in each trial.
//! Trial `t` of point `(L, p)` draws its error from a stream derived from
//! the master seed and `(L, p, model, t)`, so results do not depend on the
//! number of workers. With a target error count, a point stops at the first
//! trial after which every decoder has reached the target.

mod campaign;
mod config;
mod fatal;
mod oracle_check;
mod output;
mod scaling;
mod stats;

pub use campaign::{
    frame_digest, run_campaign, run_point, AlgorithmSummary, CampaignResult, PointResult, ResultRow, TrialContext,
    TrialOutcome, TrialRecord,
};
pub use config::{model_name, Algorithm, ExperimentConfig, StopRule, WORKERS_ENV};
pub use fatal::{column_chain, fatal_pattern_suite, FatalCase, FatalReport};
pub use oracle_check::{oracle_check, OracleCheckConfig, OracleCheckReport, TIE_TOLERANCE};
pub use output::{
    read_results_csv, results_to_string, write_plot_files, write_results_csv, write_trial_log, TRUNCATION_MARKER,
};
pub use scaling::{fit_power_law, scaling_probe, PowerLawFit, ScalingConfig, ScalingPoint, ScalingReport};
pub use stats::{wilson_interval, PairedCounts, Z95, Z95_ONE_SIDED};

/// Process exit codes of the command-line tool.
pub mod exit_code {
    pub const SUCCESS: i32 = 0;
    pub const CONFIG_ERROR: i32 = 1;
    pub const ACCEPTANCE_FAILURE: i32 = 2;
}
