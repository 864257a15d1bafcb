use serde::{Deserialize, Serialize};

use super::step::{backward_step, forward_step, make_backward_proposal, ProxKind, StepOutcome};
use crate::error::{usage, Error, Result};
use crate::geometry::{Body, LedgerSnapshot};
use crate::rng::stream_rng;

/// One proximal-sampler configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProxParams {
    pub kind: ProxKind,
    /// Forward-step variance.
    pub h: f64,
    /// Rejection cap per backward step.
    pub n_cap: u64,
    /// Number of forward+backward rounds.
    pub k: u64,
    pub seed: u64,
    /// Stream id inside `seed`; pipelines use the phase index.
    pub stream: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainOptions {
    pub burn_in: u64,
    pub thin: u64,
    /// Debug only: skip a failed backward step instead of aborting.
    pub continue_on_failure: bool,
}

impl ChainOptions {
    /// Keep every `thin`-th state after `burn_in`.
    pub fn new(burn_in: u64, thin: u64) -> Self {
        Self { burn_in, thin, continue_on_failure: false }
    }

    /// Only the final state.
    pub fn last_only(k: u64) -> Self {
        Self::new(k, 1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub params: ProxParams,
    pub options: ChainOptions,
    pub samples: Vec<Vec<f64>>,
    /// The final state (the chain's single-sample output).
    pub last: Vec<f64>,
    /// Completed rounds.
    pub total_iterations: u64,
    pub failures: u64,
    /// 1-based round at which the first failure happened.
    pub failed_at: Option<u64>,
    /// Ledger delta over the run, including the initial membership check.
    pub queries: LedgerSnapshot,
}

impl ChainReport {
    pub fn succeeded(&self) -> bool {
        self.failures == 0
    }
}

/// Runs `params.k` rounds of forward + backward from `x_init`.
///
/// `x_init` is checked with one membership query. With `k = 0` the report
/// holds `x_init` as its only sample. The first backward failure aborts the
/// run (unless `continue_on_failure`) and is reported, not returned as `Err`.
pub fn run_chain(params: &ProxParams, x_init: &[f64], body: &Body, opts: ChainOptions) -> Result<ChainReport> {
    if !(params.h > 0.0 && params.h.is_finite()) {
        return Err(usage(format!("step size h must be positive, got {}", params.h)));
    }
    if params.n_cap == 0 {
        return Err(usage("rejection cap N must be at least 1"));
    }
    if opts.thin == 0 {
        return Err(usage("thin must be at least 1"));
    }
    if params.k > 0 && opts.burn_in > params.k {
        return Err(usage(format!("burn_in {} exceeds k {}", opts.burn_in, params.k)));
    }
    params.kind.validate()?;
    if x_init.len() != body.dim() {
        return Err(Error::Dimension { expected: body.dim(), got: x_init.len() });
    }
    let before = body.ledger().snapshot();
    if !body.contains(x_init)? {
        return Err(usage("initial point is not in the body"));
    }

    let mut rng = stream_rng(params.seed, params.stream);
    let mut x = x_init.to_vec();
    let mut samples = Vec::new();
    let mut failures = 0;
    let mut failed_at = None;
    let mut done = 0;
    if params.k == 0 {
        samples.push(x.clone());
    }
    for i in 1..=params.k {
        let y = forward_step(&x, params.h, &mut rng);
        let prop = make_backward_proposal(params.kind, &y, params.h, body)?;
        match backward_step(&prop, params.n_cap, &mut rng)? {
            StepOutcome::Accepted { x: next, .. } => x = next,
            StepOutcome::Failure { .. } => {
                failures += 1;
                failed_at.get_or_insert(i);
                if !opts.continue_on_failure {
                    log::warn!("{} chain failed at round {i} of {}", params.kind.name(), params.k);
                    break;
                }
            }
        }
        done = i;
        if i > opts.burn_in && (i - opts.burn_in) % opts.thin == 0 {
            samples.push(x.clone());
        }
    }
    Ok(ChainReport {
        params: *params,
        options: opts,
        samples,
        last: x,
        total_iterations: done,
        failures,
        failed_at,
        queries: body.ledger().snapshot().since(&before),
    })
}
