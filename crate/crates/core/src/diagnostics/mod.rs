//! Ground-truth oracles and statistical validators.

mod annealing;
mod experiments;
mod quadrature;
mod stats;

pub use annealing::{
    default_annealing_cases, global_alpha_grid, AnnealingCase, AnnealingCheckRow, Potential1D, BOUND_SLACK,
};
pub use experiments::{
    cov_weight_experiment, held_out_opnorm, trial_count_check, CovExperiment, CovExperimentConfig, CovRow,
    TrialCountReport,
};
pub use quadrature::{log_integrate, renyi_q_1d, Density1D, DivergenceEstimate, DivergenceMethod, LogIntegral};
pub use stats::{
    cov_opnorm, covariance_matrix, empirical_moments, ks_1d, ks_discrete, reference_rejection_sampler,
    uniform_ball, uniform_box, CovarianceEstimate, Moments, RejectionOutput,
};
