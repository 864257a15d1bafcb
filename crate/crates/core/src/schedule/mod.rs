//! Parameter rules, annealing closeness bounds and annealing schedules.

mod bounds;
mod params;
mod plans;

pub use bounds::{global_annealing_bound, variance_annealing_bound, Closeness};
pub use params::{
    choose_params, choose_q, ps_params, solve_iteration_count, Constants, Mode, ParamChoice, PsFormula,
    TheoryValues, ASSUMED_M2, DEFAULT_PRACTICAL_N_CAP,
};
pub use plans::{
    fast_mixing_threshold, gc_sigma_schedule, logconcave_plan, split_budget, std_gaussian_plan,
    std_gaussian_schedule, tgc_phase_plan, uniform_plan, AnnealStep, Budget, GcStep, Phase, PhasePlan,
    PipelineKind, PlanSettings, TRUNCATION_EPS,
};
