use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::init::{init_rejection_gaussian, init_rejection_gaussian_at, init_rejection_tgc, x_marginal, InitDraw};
use crate::error::{usage, Result};
use crate::geometry::{
    epigraph_body, truncate_for_logconcave, truncate_to_ball, Body, LedgerSnapshot, Potential,
};
use crate::proximal::{run_chain, ChainOptions, ChainReport, ProxKind, ProxParams};
use crate::rng::stream_rng;
use crate::schedule::{
    logconcave_plan, std_gaussian_plan, uniform_plan, Phase, PhasePlan, PlanSettings, TRUNCATION_EPS,
};

/// What to sample.
#[derive(Debug, Clone)]
pub enum TargetSpec {
    UniformBody(Body),
    TruncatedStdGaussian(Body),
    Logconcave(Potential),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub settings: PlanSettings,
    pub seed: u64,
    /// Samples kept from the final leg.
    pub final_samples: usize,
    /// Thinning stride of the final leg.
    pub thin: u64,
    pub record_wall_time: bool,
}

impl PipelineConfig {
    pub fn new(settings: PlanSettings, seed: u64) -> Self {
        Self { settings, seed, final_samples: 1000, thin: 1, record_wall_time: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitRecord {
    pub attempts: u64,
    pub queries: LedgerSnapshot,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseRecord {
    pub index: usize,
    pub phase: Phase,
    pub chain: ChainReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureInfo {
    pub step_index: usize,
    pub phase: Phase,
    /// 1-based round of the failed backward step.
    pub round: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub plan: PhasePlan,
    pub seed: u64,
    pub init: InitRecord,
    pub phases: Vec<PhaseRecord>,
    pub executed_phase_count: usize,
    /// Final samples in the caller's frame (the `x`-marginal for logconcave
    /// targets).
    pub samples: Vec<Vec<f64>>,
    /// Logconcave targets only: final `(x, t)` samples with `x` in the
    /// caller's frame and `V(x) − min V ≤ n·t`.
    pub epigraph_samples: Option<Vec<Vec<f64>>>,
    pub total_queries: LedgerSnapshot,
    pub failure: Option<FailureInfo>,
    pub wall_time_secs: Option<f64>,
}

impl PipelineReport {
    pub fn succeeded(&self) -> bool {
        self.failure.is_none()
    }

    /// Initializer plus every phase; equals `total_queries` exactly.
    pub fn summed_queries(&self) -> LedgerSnapshot {
        self.phases.iter().fold(self.init.queries, |acc, p| acc.add(&p.chain.queries))
    }
}

/// Runs `plan` from `start`. `body_for(step)` picks the body each step runs on.
#[allow(clippy::too_many_arguments)]
fn run_phases<'a>(
    plan: &PhasePlan,
    cfg: &PipelineConfig,
    start: Vec<f64>,
    body_for: impl Fn(&ProxKind) -> &'a Body,
) -> Result<(Vec<PhaseRecord>, Vec<Vec<f64>>, Option<FailureInfo>)> {
    let mut x = start;
    let mut phases = Vec::with_capacity(plan.steps.len());
    let last = plan.steps.len().saturating_sub(1);
    for step in &plan.steps {
        let k_plan = step.params.k;
        let (k, opts) = if step.index == last {
            let keep = cfg.final_samples as u64 * cfg.thin;
            (k_plan + keep, ChainOptions::new(k_plan, cfg.thin))
        } else {
            (k_plan, ChainOptions::last_only(k_plan))
        };
        let params = ProxParams {
            kind: step.kind,
            h: step.params.h,
            n_cap: step.params.n_cap,
            k,
            seed: cfg.seed,
            stream: step.index as u64 + 1,
        };
        log::debug!("step {} {:?}: {:?} h = {:.3e}, k = {k}", step.index, step.phase, step.kind, params.h);
        let report = run_chain(&params, &x, body_for(&step.kind), opts)?;
        let failed = report.failed_at;
        x = report.last.clone();
        phases.push(PhaseRecord { index: step.index, phase: step.phase, chain: report });
        if let Some(round) = failed {
            let failure = FailureInfo { step_index: step.index, phase: step.phase, round };
            log::warn!("pipeline aborted: {failure:?}");
            return Ok((phases, Vec::new(), Some(failure)));
        }
    }
    let samples = match phases.last_mut() {
        Some(p) => std::mem::take(&mut p.chain.samples),
        None => vec![x],
    };
    Ok((phases, samples, None))
}

fn check_config(cfg: &PipelineConfig) -> Result<()> {
    cfg.settings.validate()?;
    if cfg.thin == 0 {
        return Err(usage("thin must be at least 1"));
    }
    Ok(())
}

/// Uniform law on `body` from a cold start: ball truncation, Gaussian
/// initializer, Gaussian cooling with `PS_gauss`, then `PS_unif` on the
/// original body.
pub fn sample_uniform_cold(body: &Body, cfg: &PipelineConfig) -> Result<PipelineReport> {
    check_config(cfg)?;
    let r = body.r_bound().ok_or_else(|| usage("uniform pipeline needs a body with declared R"))?;
    let clock = Instant::now();
    let x0 = body.center().to_vec();
    let k0 = body.translated(&x0)?;
    let k_bar = truncate_to_ball(&k0, TRUNCATION_EPS)?;
    let plan = uniform_plan(body.dim(), r, &cfg.settings)?;

    let ledger = body.ledger();
    let before = ledger.snapshot();
    let InitDraw { point, attempts } = init_rejection_gaussian(&k_bar, &mut stream_rng(cfg.seed, 0))?;
    let init = InitRecord { attempts, queries: ledger.snapshot().since(&before) };
    let (phases, samples, failure) = run_phases(&plan, cfg, point, |kind| match kind {
        ProxKind::Unif => &k0,
        _ => &k_bar,
    })?;
    let samples = samples.into_iter().map(|s| s.iter().zip(&x0).map(|(a, b)| a + b).collect()).collect();
    Ok(finish(plan, cfg, init, phases, samples, None, ledger.snapshot().since(&before), failure, clock))
}

/// Standard Gaussian restricted to `body`: Gaussian initializer at the
/// origin and cooling `σ²: 1/n → 1` with `PS_gauss`.
pub fn sample_std_gaussian_cold(body: &Body, cfg: &PipelineConfig) -> Result<PipelineReport> {
    check_config(cfg)?;
    let clock = Instant::now();
    let n = body.dim();
    let plan = std_gaussian_plan(n, body.r_bound().unwrap_or(1.0), &cfg.settings)?;
    let ledger = body.ledger();
    let before = ledger.snapshot();
    let origin = vec![0.0; n];
    let InitDraw { point, attempts } = init_rejection_gaussian_at(body, &origin, &mut stream_rng(cfg.seed, 0))?;
    let init = InitRecord { attempts, queries: ledger.snapshot().since(&before) };
    let (phases, samples, failure) = run_phases(&plan, cfg, point, |_| body)?;
    Ok(finish(plan, cfg, init, phases, samples, None, ledger.snapshot().since(&before), failure, clock))
}

/// Logconcave `e^{−V}` from a cold start via the epigraph `{V(x) ≤ n·t}`:
/// truncation, tilted initializer, Phases I–III with `PS_ann`, then
/// `PS_exp` on the untruncated epigraph; returns the `x`-marginal.
pub fn sample_logconcave_cold(pot: &Potential, cfg: &PipelineConfig) -> Result<PipelineReport> {
    check_config(cfg)?;
    let clock = Instant::now();
    let n = pot.dim();
    let x0 = pot.x0().to_vec();
    let centered = pot.recentered();
    let k = epigraph_body(&centered)?;
    let k_bar = truncate_for_logconcave(&k, pot.r_bound(), TRUNCATION_EPS)?;
    let plan = logconcave_plan(n, pot.r_bound(), &cfg.settings)?;

    let ledger = k.ledger();
    let before = ledger.snapshot();
    let InitDraw { point, attempts } = init_rejection_tgc(&k_bar, &mut stream_rng(cfg.seed, 0))?;
    let init = InitRecord { attempts, queries: ledger.snapshot().since(&before) };
    let (phases, samples, failure) = run_phases(&plan, cfg, point, |kind| match kind {
        ProxKind::Exp => &k,
        _ => &k_bar,
    })?;
    let epi: Vec<Vec<f64>> = samples
        .into_iter()
        .map(|z| {
            let mut w: Vec<f64> = z[..n].iter().zip(&x0).map(|(a, b)| a + b).collect();
            w.push(z[n]);
            w
        })
        .collect();
    let xs = epi.iter().map(|z| x_marginal(z)).collect();
    Ok(finish(plan, cfg, init, phases, xs, Some(epi), ledger.snapshot().since(&before), failure, clock))
}

/// Dispatches on the target type.
pub fn sample_cold(target: &TargetSpec, cfg: &PipelineConfig) -> Result<PipelineReport> {
    match target {
        TargetSpec::UniformBody(b) => sample_uniform_cold(b, cfg),
        TargetSpec::TruncatedStdGaussian(b) => sample_std_gaussian_cold(b, cfg),
        TargetSpec::Logconcave(p) => sample_logconcave_cold(p, cfg),
    }
}

/// The plan a pipeline would execute, without touching any oracle.
pub fn plan_for(target: &TargetSpec, settings: &PlanSettings) -> Result<PhasePlan> {
    match target {
        TargetSpec::UniformBody(b) => {
            let r = b.r_bound().ok_or_else(|| usage("uniform pipeline needs a body with declared R"))?;
            uniform_plan(b.dim(), r, settings)
        }
        TargetSpec::TruncatedStdGaussian(b) => std_gaussian_plan(b.dim(), b.r_bound().unwrap_or(1.0), settings),
        TargetSpec::Logconcave(p) => logconcave_plan(p.dim(), p.r_bound(), settings),
    }
}

#[allow(clippy::too_many_arguments)]
fn finish(
    plan: PhasePlan,
    cfg: &PipelineConfig,
    init: InitRecord,
    phases: Vec<PhaseRecord>,
    samples: Vec<Vec<f64>>,
    epigraph_samples: Option<Vec<Vec<f64>>>,
    total_queries: LedgerSnapshot,
    failure: Option<FailureInfo>,
    clock: Instant,
) -> PipelineReport {
    PipelineReport {
        plan,
        seed: cfg.seed,
        init,
        executed_phase_count: phases.len(),
        phases,
        samples,
        epigraph_samples,
        total_queries,
        failure,
        wall_time_secs: cfg.record_wall_time.then(|| clock.elapsed().as_secs_f64()),
    }
}
