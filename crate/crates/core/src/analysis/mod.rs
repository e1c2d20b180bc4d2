//! Empirical checks of the recovery theory and the reported error metrics.

mod coherence;
mod metrics;

pub use coherence::{
    coherence_bound, coherence_failure_probability, coherence_study, coherence_trial, trial_state, CoherenceReport,
};
pub use metrics::{coefficient_error, sample_complexity, solution_error, support_check, RecoveryMetrics, SupportCheck};
