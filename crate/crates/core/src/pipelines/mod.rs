//! Cold-start pipelines: Gaussian cooling for uniform targets, cooling for
//! the restricted standard Gaussian, and tilted Gaussian cooling for
//! logconcave targets through the epigraph.

mod init;
mod run;

pub use init::{
    init_rejection_gaussian, init_rejection_gaussian_at, init_rejection_tgc, lift_to_epigraph, lift_to_epigraph_with,
    x_marginal, InitDraw, INIT_ATTEMPT_CAP,
};
pub use run::{
    plan_for, sample_cold, sample_logconcave_cold, sample_std_gaussian_cold, sample_uniform_cold, FailureInfo,
    InitRecord, PhaseRecord, PipelineConfig, PipelineReport, TargetSpec,
};
