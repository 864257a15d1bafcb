use serde::{Deserialize, Serialize};

use crate::error::{usage, Result};

/// Rényi-`q` bound between `e^{−(1+α)V}` and `e^{−V}` for a logconcave
/// `e^{−V}` on `R^n`: `qnα²/2` for `α ≥ 0`, `qnα²/(1−qδ)` for
/// `α ∈ [−δ/2, 0]` with `1 − qδ > 0`.
pub fn global_annealing_bound(q: f64, n: usize, alpha: f64, delta: f64) -> Result<f64> {
    if !(q > 1.0) {
        return Err(usage(format!("q must exceed 1, got {q}")));
    }
    let nf = n as f64;
    if alpha >= 0.0 {
        return Ok(q * nf * alpha * alpha / 2.0);
    }
    if !(1.0 - q * delta > 0.0 && delta > 0.0) {
        return Err(usage(format!("negative alpha needs 0 < delta < 1/q, got delta = {delta}")));
    }
    if alpha < -delta / 2.0 {
        return Err(usage(format!("alpha = {alpha} is below -delta/2 = {}", -delta / 2.0)));
    }
    Ok(q * nf * alpha * alpha / (1.0 - q * delta))
}

/// Rényi-`q` bound `qR²α²/σ²` between `μγ_{σ²}` and `μγ_{σ²(1+α)}` for a
/// logconcave `μ` whose support lies within distance `R` of the origin.
pub fn variance_annealing_bound(q: f64, r: f64, sigma: f64, alpha: f64) -> Result<f64> {
    if !(q > 1.0) {
        return Err(usage(format!("q must exceed 1, got {q}")));
    }
    if !(r > 0.0 && sigma > 0.0 && alpha >= 0.0) {
        return Err(usage("variance bound needs R, sigma > 0 and alpha ≥ 0"));
    }
    Ok(q * r * r * alpha * alpha / (sigma * sigma))
}

/// How an annealing step's closeness to its predecessor is certified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "lemma", rename_all = "snake_case")]
pub enum Closeness {
    /// Potential scaled by `1 + alpha` in dimension `n`.
    Global { q: f64, n: usize, alpha: f64, bound: f64 },
    /// Variance `σ² → σ²(1 + alpha)` over support radius `radius`.
    Variance { q: f64, radius: f64, sigma: f64, alpha: f64, bound: f64 },
    /// Sup-ratio (`R_∞`) bound for handoffs that change the target family.
    Sup { bound: f64 },
}

impl Closeness {
    pub fn global(q: f64, n: usize, alpha: f64) -> Result<Self> {
        Ok(Closeness::Global { q, n, alpha, bound: global_annealing_bound(q, n, alpha, 0.0)? })
    }

    pub fn variance(q: f64, radius: f64, sigma: f64, alpha: f64) -> Result<Self> {
        Ok(Closeness::Variance { q, radius, sigma, alpha, bound: variance_annealing_bound(q, radius, sigma, alpha)? })
    }

    pub fn bound(&self) -> f64 {
        match *self {
            Closeness::Global { bound, .. } | Closeness::Variance { bound, .. } | Closeness::Sup { bound } => bound,
        }
    }

    /// Re-evaluates the closed form from the stored inputs.
    pub fn recompute(&self) -> Result<f64> {
        match *self {
            Closeness::Global { q, n, alpha, .. } => global_annealing_bound(q, n, alpha, 0.0),
            Closeness::Variance { q, radius, sigma, alpha, .. } => variance_annealing_bound(q, radius, sigma, alpha),
            Closeness::Sup { bound } => Ok(bound),
        }
    }

    /// Whether the step is one of the scaling steps expected to stay `O(1)`.
    pub fn is_scaling(&self) -> bool {
        !matches!(self, Closeness::Sup { .. })
    }
}
