use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::{cov_opnorm, ks_discrete};
use crate::error::{usage, Result};
use crate::geometry::Body;
use crate::schedule::DEFAULT_PRACTICAL_N_CAP;
use crate::proximal::{
    backward_step, exact_local_conductance_box, make_backward_proposal, run_chain, ChainOptions, ProxKind,
    ProxParams, StepOutcome,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialCountReport {
    pub reps: usize,
    pub mean_attempts: f64,
    /// `1/ℓ(y)`.
    pub expected_attempts: f64,
    pub relative_error: f64,
    /// KS distance of the attempt counts to `Geometric(ℓ)`.
    pub ks_geometric: f64,
    pub n_cap: u64,
}

/// Runs `reps` uniform backward steps at `y` on the box `[lo, hi]` and
/// compares the attempt counts to the exact local conductance.
pub fn trial_count_check<R: Rng + ?Sized>(
    lo: &[f64],
    hi: &[f64],
    y: &[f64],
    h: f64,
    reps: usize,
    rng: &mut R,
) -> Result<TrialCountReport> {
    if reps == 0 {
        return Err(usage("trial_count_check needs reps ≥ 1"));
    }
    let body = Body::axis_box(lo.to_vec(), hi.to_vec())?;
    let ell = exact_local_conductance_box(y, h, lo, hi);
    if !(ell > 0.0) {
        return Err(usage("local conductance underflows; move y closer to the box"));
    }
    let n_cap = ((100.0 / ell).ceil() as u64).max(1000);
    let prop = make_backward_proposal(ProxKind::Unif, y, h, &body)?;
    let mut counts = Vec::with_capacity(reps);
    for _ in 0..reps {
        match backward_step(&prop, n_cap, rng)? {
            StepOutcome::Accepted { attempts, .. } | StepOutcome::Failure { attempts } => counts.push(attempts),
        }
    }
    let mean = counts.iter().sum::<u64>() as f64 / reps as f64;
    let expected = 1.0 / ell;
    let ks = ks_discrete(&counts, |k| 1.0 - (1.0 - ell).powi(k.min(i32::MAX as u64) as i32));
    Ok(TrialCountReport {
        reps,
        mean_attempts: mean,
        expected_attempts: expected,
        relative_error: (mean - expected).abs() / expected,
        ks_geometric: ks,
        n_cap,
    })
}

/// Settings for [`cov_weight_experiment`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CovExperimentConfig {
    pub h_grid: Vec<f64>,
    pub samples_per_h: usize,
    /// Step size of the sampler is `min(σ², step_cap)`.
    pub step_cap: f64,
    pub burn_in: u64,
    pub thin: u64,
    pub n_cap: u64,
    pub seed: u64,
    pub c_env: f64,
    /// Number of batches for the batch-means standard error.
    pub batches: usize,
}

impl CovExperimentConfig {
    pub fn new(h_grid: Vec<f64>, seed: u64) -> Self {
        Self {
            h_grid,
            samples_per_h: 20_000,
            step_cap: 0.05,
            burn_in: 2_000,
            thin: 5,
            n_cap: DEFAULT_PRACTICAL_N_CAP,
            seed,
            c_env: 1.0,
            batches: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovRow {
    pub h: f64,
    pub lambda_hat: f64,
    /// Absolute standard error of `lambda_hat`.
    pub stderr: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub stream: u64,
    pub failed: bool,
    /// `lambda_hat ≤ min(h, c_env·λ̂_∞) + 3·stderr`.
    pub within_envelope: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovExperiment {
    pub config: CovExperimentConfig,
    /// `λ̂` at the largest `h` of the grid.
    pub lambda_inf: f64,
    pub rows: Vec<CovRow>,
}

impl CovExperiment {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("h,lambda_hat,stderr,n_samples,seed\n");
        for r in &self.rows {
            s.push_str(&format!("{:.16e},{:.16e},{:.16e},{},{}\n", r.h, r.lambda_hat, r.stderr, r.n_samples, r.seed));
        }
        s
    }
}

/// Held-out top-eigenvalue estimate: the direction comes from the first half
/// of the samples and the variance along it from the second half, so the
/// estimate is not biased upward by fitting the noise. The standard error is
/// by batch means over the second half.
pub fn held_out_opnorm(samples: &[Vec<f64>], batches: usize) -> Result<(f64, f64)> {
    let d = samples.first().map_or(0, |s| s.len());
    let half = samples.len() / 2;
    if half < d + 1 || batches < 2 || samples.len() - half < 2 * batches {
        return Err(usage("held_out_opnorm needs more samples"));
    }
    let est = cov_opnorm(&samples[..half])?;
    let v = est.eigenvector;
    let proj: Vec<f64> = samples[half..].iter().map(|x| x.iter().zip(&v).map(|(a, b)| a * b).sum()).collect();
    let m = proj.iter().sum::<f64>() / proj.len() as f64;
    let sq: Vec<f64> = proj.iter().map(|p| (p - m) * (p - m)).collect();
    let lambda = sq.iter().sum::<f64>() / sq.len() as f64;
    let per = sq.len() / batches;
    let bm: Vec<f64> = (0..batches).map(|b| sq[b * per..(b + 1) * per].iter().sum::<f64>() / per as f64).collect();
    let mb = bm.iter().sum::<f64>() / batches as f64;
    let var = bm.iter().map(|x| (x - mb).powi(2)).sum::<f64>() / (batches - 1) as f64;
    Ok((lambda, (var / batches as f64).sqrt()))
}

/// `‖cov πγ_h‖` along a grid of `h` for the uniform law `π` on `body`,
/// estimated from a `PS_gauss` chain with `σ² = h` per grid point. Rows are
/// computed in parallel from independent streams; a failed chain is flagged
/// and the experiment continues.
pub fn cov_weight_experiment(body: &Body, cfg: &CovExperimentConfig) -> Result<CovExperiment> {
    if cfg.h_grid.is_empty() || cfg.h_grid.iter().any(|h| !(*h > 0.0)) {
        return Err(usage("h grid must be non-empty and positive"));
    }
    if cfg.thin == 0 || cfg.samples_per_h < 4 * cfg.batches.max(2) {
        return Err(usage("cov experiment needs thin ≥ 1 and enough samples per h"));
    }
    let k = cfg.burn_in + cfg.samples_per_h as u64 * cfg.thin;
    let results: Vec<Result<CovRow>> = cfg
        .h_grid
        .par_iter()
        .enumerate()
        .map(|(i, &h)| {
            let params = ProxParams {
                kind: ProxKind::Gauss { sigma2: h },
                h: h.min(cfg.step_cap),
                n_cap: cfg.n_cap,
                k,
                seed: cfg.seed,
                stream: i as u64,
            };
            let report = run_chain(&params, body.center(), body, ChainOptions::new(cfg.burn_in, cfg.thin))?;
            if !report.succeeded() {
                return Ok(CovRow {
                    h,
                    lambda_hat: f64::NAN,
                    stderr: f64::NAN,
                    n_samples: report.samples.len(),
                    seed: cfg.seed,
                    stream: i as u64,
                    failed: true,
                    within_envelope: false,
                });
            }
            let (lambda_hat, stderr) = held_out_opnorm(&report.samples, cfg.batches)?;
            Ok(CovRow {
                h,
                lambda_hat,
                stderr,
                n_samples: report.samples.len(),
                seed: cfg.seed,
                stream: i as u64,
                failed: false,
                within_envelope: false,
            })
        })
        .collect();
    let mut rows = results.into_iter().collect::<Result<Vec<_>>>()?;
    let top = rows
        .iter()
        .filter(|r| !r.failed)
        .max_by(|a, b| a.h.total_cmp(&b.h))
        .map_or(f64::NAN, |r| r.lambda_hat);
    for r in rows.iter_mut().filter(|r| !r.failed) {
        let env = r.h.min(cfg.c_env * top);
        r.within_envelope = r.lambda_hat <= env + 3.0 * r.stderr;
    }
    Ok(CovExperiment { config: cfg.clone(), lambda_inf: top, rows })
}
