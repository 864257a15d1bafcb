use serde::{Deserialize, Serialize};

use super::bounds::Closeness;
use super::params::{choose_params, choose_q, Constants, Mode, ParamChoice};
use crate::error::{usage, Result};
use crate::geometry::{ball_truncation_level, logconcave_truncation_level};
use crate::proximal::ProxKind;

/// Truncation level used by every pipeline (`ε = 1/2`), independent of the
/// user's accuracy target.
pub const TRUNCATION_EPS: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    /// `σ²` growth on the truncated body (uniform pipeline).
    GaussianCooling,
    /// `σ²` growth `1/n → 1` (truncated standard Gaussian pipeline).
    StdGaussian,
    /// Phase I: `σ²` warming at `ρ = 0`.
    Warming,
    /// Phase II start: `ρ` switched on at `σ² = 1`.
    TiltStart,
    /// Phase II outer step: `ρ` up, `σ²` down by the same factor.
    TiltOuter,
    /// Phase II inner step: `σ²` restored toward 1.
    TiltInner,
    /// Phase III: `σ²` growth at `ρ = n`.
    SigmaAnnealing,
    /// Hand-off to the actual target.
    Terminal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GcStep {
    pub sigma2: f64,
    pub fast_mixing: bool,
}

/// `c_thr · D·√λ·ln²n·ln²(D²/λ)`.
pub fn fast_mixing_threshold(n: usize, d: f64, lambda: f64, c_thr: f64) -> f64 {
    let ln_n = (n as f64).ln();
    let ln_r = (d * d / lambda).ln();
    c_thr * d * lambda.sqrt() * ln_n * ln_n * ln_r * ln_r
}

/// Multiplies `start` by `step(σ²)` until reaching `end`; the final value is
/// clamped to `end` exactly. The start itself is not included.
fn grow(start: f64, end: f64, step: impl Fn(f64) -> f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut s = start;
    while s < end {
        s = (s * step(s)).min(end);
        out.push(s);
    }
    out
}

/// `σ²_{i+1} = σ²_i(1 + σ_i/(√q·D))` from `1/n` to `D²`, each target
/// annotated with the fast-mixing flag. Empty when `D² < 1/n`.
pub fn gc_sigma_schedule(n: usize, d: f64, lambda: f64, q: f64, c_thr: f64) -> Result<Vec<GcStep>> {
    if n == 0 || !(d > 0.0 && q > 0.0 && lambda > 0.0) {
        return Err(usage("gc schedule needs n ≥ 1 and positive D, q, lambda"));
    }
    let thr = fast_mixing_threshold(n, d, lambda, c_thr);
    let sq = q.sqrt();
    Ok(grow(1.0 / n as f64, d * d, |s2| 1.0 + s2.sqrt() / (sq * d))
        .into_iter()
        .map(|sigma2| GcStep { sigma2, fast_mixing: sigma2 >= thr })
        .collect())
}

/// `σ²_{i+1} = σ²_i(1 + (qn)^{-1/2})` from `1/n` to exactly 1. For `n = 1`
/// this is the single trivial step `[1]`.
pub fn std_gaussian_schedule(n: usize, q: f64) -> Vec<f64> {
    let r = 1.0 + 1.0 / (q * n as f64).sqrt();
    let s = grow(1.0 / n as f64, 1.0, |_| r);
    if s.is_empty() {
        vec![1.0]
    } else {
        s
    }
}

/// What a pipeline needs besides the target's geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanSettings {
    pub eta: f64,
    pub eps: f64,
    /// Hint for `‖cov π‖`; pipelines pick a default when absent.
    pub lambda: Option<f64>,
    pub constants: Constants,
    pub mode: Mode,
}

impl PlanSettings {
    pub fn new(eta: f64, eps: f64, mode: Mode) -> Self {
        Self { eta, eps, lambda: None, constants: Constants::default(), mode }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return Err(usage(format!("eta out of range (0,1): {}", self.eta)));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(usage(format!("eps out of range (0,1): {}", self.eps)));
        }
        if let Some(l) = self.lambda {
            if !(l > 0.0 && l.is_finite()) {
                return Err(usage(format!("lambda hint must be positive, got {l}")));
            }
        }
        self.mode.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnealStep {
    pub index: usize,
    pub phase: Phase,
    /// Sampler run for this step; its `σ²`/`ρ` are the step's targets.
    pub kind: ProxKind,
    pub closeness: Closeness,
    pub fast_mixing: bool,
    pub eta_phase: f64,
    pub eps_phase: f64,
    pub params: ParamChoice,
}

impl AnnealStep {
    pub fn sigma2(&self) -> Option<f64> {
        match self.kind {
            ProxKind::Gauss { sigma2 } | ProxKind::Ann { sigma2, .. } => Some(sigma2),
            _ => None,
        }
    }

    pub fn rho(&self) -> Option<f64> {
        match self.kind {
            ProxKind::Ann { rho, .. } => Some(rho),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PipelineKind {
    Uniform,
    StdGaussian,
    Logconcave,
}

impl PipelineKind {
    /// Practical scales that run in seconds for `n ≲ 10`. The epigraph
    /// pipelines need a smaller `h`: the `−n·h` drift of `PS_exp`/`PS_ann`
    /// in `t` fattens the rejection-count tail unless `n²·h ≪ 1`.
    pub fn default_mode(self) -> Mode {
        match self {
            PipelineKind::Uniform | PipelineKind::StdGaussian => Mode::practical(100.0, 100.0),
            PipelineKind::Logconcave => Mode::practical(4e4, 4e5),
        }
    }

    /// Thinning for the final leg that roughly matches its autocorrelation
    /// time under [`default_mode`](Self::default_mode).
    pub fn default_thin(self) -> u64 {
        match self {
            PipelineKind::Uniform | PipelineKind::StdGaussian => 5,
            PipelineKind::Logconcave => 300,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    pub eta_per_phase: f64,
    pub eps_per_phase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePlan {
    pub pipeline: PipelineKind,
    /// Dimension of `x`.
    pub n: usize,
    pub q: f64,
    /// Diameter used by the schedule (after truncation).
    pub d: f64,
    pub r_bound: f64,
    pub lambda: f64,
    pub settings: PlanSettings,
    pub budget: Budget,
    pub predicted_phase_count: usize,
    pub steps: Vec<AnnealStep>,
}

/// Target of one step before parameters are attached.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Target {
    phase: Phase,
    kind: ProxKind,
    closeness: Closeness,
    fast_mixing: bool,
}

/// `[x/m; m]` except that the last entry absorbs the rounding remainder, so
/// the left-to-right sum is exactly `x`.
pub fn split_budget(x: f64, m: usize) -> Vec<f64> {
    if m == 0 {
        return Vec::new();
    }
    let per = x / m as f64;
    let mut out = vec![per; m];
    let head: f64 = out[..m - 1].iter().sum();
    out[m - 1] = x - head;
    out
}

fn mixing_constant(kind: &ProxKind, fast: bool, d: f64, lambda: f64) -> f64 {
    match *kind {
        ProxKind::Unif => lambda,
        ProxKind::Gauss { sigma2 } if fast => sigma2.min(d * lambda.sqrt()),
        ProxKind::Gauss { sigma2 } => sigma2,
        ProxKind::Exp => lambda.max(1.0),
        ProxKind::Ann { sigma2, .. } if fast => sigma2.max(1.0).min(d.max(1.0) * lambda.sqrt().max(1.0)),
        ProxKind::Ann { sigma2, .. } => sigma2.max(1.0),
    }
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    pipeline: PipelineKind,
    n: usize,
    q: f64,
    d: f64,
    r_bound: f64,
    lambda: f64,
    settings: &PlanSettings,
    targets: Vec<Target>,
) -> Result<PhasePlan> {
    let m = targets.len();
    let etas = split_budget(settings.eta, m);
    let epss = split_budget(settings.eps, m);
    let mut steps = Vec::with_capacity(m);
    for (i, t) in targets.into_iter().enumerate() {
        let c_mix = mixing_constant(&t.kind, t.fast_mixing, d, lambda);
        let params = choose_params(&t.kind, n, c_mix, q, etas[i], epss[i], &settings.constants, &settings.mode)?;
        steps.push(AnnealStep {
            index: i,
            phase: t.phase,
            kind: t.kind,
            closeness: t.closeness,
            fast_mixing: t.fast_mixing,
            eta_phase: etas[i],
            eps_phase: epss[i],
            params,
        });
    }
    Ok(PhasePlan {
        pipeline,
        n,
        q,
        d,
        r_bound,
        lambda,
        settings: *settings,
        budget: Budget { eta_per_phase: settings.eta / m as f64, eps_per_phase: settings.eps / m as f64 },
        predicted_phase_count: m,
        steps,
    })
}

/// Gaussian cooling on `K ∩ B_{LR}(x0)` followed by a uniform hand-off.
/// `r_bound` is the body's declared `R`; the schedule runs on `D = 2LR`.
pub fn uniform_plan(n: usize, r_bound: f64, settings: &PlanSettings) -> Result<PhasePlan> {
    settings.validate()?;
    let d = 2.0 * ball_truncation_level(TRUNCATION_EPS) * r_bound;
    let lambda = settings.lambda.unwrap_or(d * d);
    let q = choose_q(n, d, settings.eta, settings.eps, settings.constants.c_q);
    let sq = q.sqrt();
    let mut targets = Vec::new();
    let mut prev = 1.0 / n as f64;
    for s in gc_sigma_schedule(n, d, lambda, q, settings.constants.c_thr)? {
        let sigma = prev.sqrt();
        let alpha = s.sigma2 / prev - 1.0;
        debug_assert!(alpha <= sigma / (sq * d) * (1.0 + 1e-12));
        targets.push(Target {
            phase: Phase::GaussianCooling,
            kind: ProxKind::Gauss { sigma2: s.sigma2 },
            closeness: Closeness::variance(q, d / 2.0, sigma, alpha)?,
            fast_mixing: s.fast_mixing,
        });
        prev = s.sigma2;
    }
    // Sup ratio of π̄γ_{D²} to π: 2 from the truncation, e^{1/8} from the
    // Gaussian factor over a ball of radius D/2.
    targets.push(Target {
        phase: Phase::Terminal,
        kind: ProxKind::Unif,
        closeness: Closeness::Sup { bound: 2f64.ln() + 0.125 },
        fast_mixing: false,
    });
    assemble(PipelineKind::Uniform, n, q, d, r_bound, lambda, settings, targets)
}

/// Gaussian cooling `1/n → 1` for the standard Gaussian restricted to a body.
pub fn std_gaussian_plan(n: usize, r_bound: f64, settings: &PlanSettings) -> Result<PhasePlan> {
    settings.validate()?;
    let q = choose_q(n, 1.0, settings.eta, settings.eps, settings.constants.c_q);
    let mut targets = Vec::new();
    let mut prev = 1.0 / n as f64;
    for s2 in std_gaussian_schedule(n, q) {
        targets.push(Target {
            phase: Phase::StdGaussian,
            kind: ProxKind::Gauss { sigma2: s2 },
            closeness: Closeness::global(q, n, s2 / prev - 1.0)?,
            fast_mixing: false,
        });
        prev = s2;
    }
    let lambda = settings.lambda.unwrap_or(1.0);
    assemble(PipelineKind::StdGaussian, n, q, 1.0, r_bound, lambda, settings, targets)
}

/// Tilted Gaussian cooling on the truncated epigraph `K̄` with `D = R·l`,
/// `l = ln(2e/eps)`: Phase I (`σ²: 1/n → 1`), Phase II (`ρ: 0 → 1 → n`
/// with inner `σ²` restoration), Phase III (`σ²: 1 → D²`), then the
/// exponential hand-off.
pub fn tgc_phase_plan(n: usize, r: f64, q: f64, eps: f64, settings: &PlanSettings) -> Result<PhasePlan> {
    settings.validate()?;
    if !(r > 0.0 && q > 1.0 && eps > 0.0 && eps < 1.0) {
        return Err(usage("tgc plan needs R > 0, q > 1 and eps in (0,1)"));
    }
    let l = logconcave_truncation_level(eps);
    let d = r * l;
    let lambda = settings.lambda.unwrap_or(r * r);
    let nf = n as f64;
    let sq = q.sqrt();
    let mut targets = Vec::new();

    // Phase I
    let r1 = 1.0 + 1.0 / (q * nf).sqrt();
    let mut prev = 1.0 / nf;
    for s2 in grow(prev, 1.0, |_| r1) {
        targets.push(Target {
            phase: Phase::Warming,
            kind: ProxKind::Ann { sigma2: s2, rho: 0.0 },
            closeness: Closeness::global(q, n + 1, s2 / prev - 1.0)?,
            fast_mixing: false,
        });
        prev = s2;
    }

    // Phase II. Switching ρ on changes the density by at most e^{13l+15}
    // over the t-range of K̄.
    let mut sigma2 = 1.0;
    let mut rho = 1.0;
    targets.push(Target {
        phase: Phase::TiltStart,
        kind: ProxKind::Ann { sigma2, rho },
        closeness: Closeness::Sup { bound: 13.0 * l + 15.0 },
        fast_mixing: false,
    });
    let gamma = 1.0 / (16.0 * q * q.max(nf)).sqrt();
    while rho < nf {
        let next = (rho * (1.0 + gamma)).min(nf);
        let ratio = next / rho;
        rho = next;
        sigma2 /= ratio;
        targets.push(Target {
            phase: Phase::TiltOuter,
            kind: ProxKind::Ann { sigma2, rho },
            closeness: Closeness::global(q, n + 1, ratio - 1.0)?,
            fast_mixing: false,
        });
        while sigma2 < 1.0 {
            let sigma = sigma2.sqrt();
            let next = (sigma2 * (1.0 + sigma / (sq * d))).min(1.0);
            let alpha = next / sigma2 - 1.0;
            sigma2 = next;
            targets.push(Target {
                phase: Phase::TiltInner,
                kind: ProxKind::Ann { sigma2, rho },
                closeness: Closeness::variance(q, d, sigma, alpha)?,
                fast_mixing: false,
            });
        }
    }

    // Phase III
    let thr = fast_mixing_threshold(n, d, lambda, settings.constants.c_thr);
    let mut prev: f64 = 1.0;
    for s2 in grow(1.0, d * d, |s2| 1.0 + s2.sqrt() / (sq * d)) {
        targets.push(Target {
            phase: Phase::SigmaAnnealing,
            kind: ProxKind::Ann { sigma2: s2, rho: nf },
            closeness: Closeness::variance(q, d, prev.sqrt(), s2 / prev - 1.0)?,
            fast_mixing: s2 >= thr,
        });
        prev = s2;
    }

    targets.push(Target {
        phase: Phase::Terminal,
        kind: ProxKind::Exp,
        closeness: Closeness::Sup { bound: 2f64.ln() },
        fast_mixing: false,
    });
    assemble(PipelineKind::Logconcave, n, q, d, r, lambda, settings, targets)
}

/// [`tgc_phase_plan`] with the pipeline's truncation level and `q` chosen
/// from `(n, D, η, ε)`.
pub fn logconcave_plan(n: usize, r: f64, settings: &PlanSettings) -> Result<PhasePlan> {
    let d = r * logconcave_truncation_level(TRUNCATION_EPS);
    let q = choose_q(n, d, settings.eta, settings.eps, settings.constants.c_q);
    tgc_phase_plan(n, r, q, TRUNCATION_EPS, settings)
}
