use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};
use crate::proximal::ProxKind;

/// Constants hidden behind `≳`/`Θ`. All default to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Constants {
    /// Multiplier in `q = c_q · ln(nD/(ηε))`.
    pub c_q: f64,
    /// Multiplier in the fast-mixing threshold on `σ²`.
    pub c_thr: f64,
    /// Multiplier in the iteration-count equation.
    pub c_iter: f64,
    /// Envelope multiplier for the covariance experiment.
    pub c_env: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Self { c_q: 1.0, c_thr: 1.0, c_iter: 1.0, c_env: 1.0 }
    }
}

/// Theory mode uses the formulas verbatim. Practical mode keeps every
/// structural decision and rescales `h ← scale_h·h`, `k ← ⌈k/scale_k⌉`,
/// `N ← min(N, n_cap)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase", deny_unknown_fields)]
pub enum Mode {
    Theory,
    Practical { scale_h: f64, scale_k: f64, n_cap: u64 },
}

impl Mode {
    pub fn practical(scale_h: f64, scale_k: f64) -> Self {
        Mode::Practical { scale_h, scale_k, n_cap: DEFAULT_PRACTICAL_N_CAP }
    }

    pub fn validate(&self) -> Result<()> {
        if let Mode::Practical { scale_h, scale_k, n_cap } = *self {
            if !(scale_h > 0.0 && scale_h.is_finite() && scale_k > 0.0 && scale_k.is_finite()) {
                return Err(usage("practical scale factors must be positive"));
            }
            if n_cap == 0 {
                return Err(usage("practical rejection cap must be at least 1"));
            }
        }
        Ok(())
    }
}

pub const DEFAULT_PRACTICAL_N_CAP: u64 = 100_000_000;

/// Warmness assumed between consecutive annealing targets (`R₂ ≤ 2`).
pub const ASSUMED_M2: f64 = std::f64::consts::E;

/// `max(2, c_q · ln(nD/(ηε)))`.
pub fn choose_q(n: usize, d: f64, eta: f64, eps: f64, c_q: f64) -> f64 {
    let v = c_q * (n as f64 * d / (eta * eps)).ln();
    if v.is_nan() {
        2.0
    } else {
        v.max(2.0)
    }
}

/// Closed-form step size, rejection cap and Rényi order threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsFormula {
    pub z: f64,
    pub h: f64,
    /// `N` before rounding; may exceed `u64::MAX`.
    pub n_cap: f64,
    pub q_required: f64,
}

fn kind_constants(kind: &ProxKind) -> (f64, i32, f64, f64) {
    // (h denominator constant, log power in N, N multiplier, q multiplier)
    match kind {
        ProxKind::Unif => (2.0, 4, 1.0, 12.0),
        ProxKind::Gauss { .. } => (10.0, 3, 1.0, 6.0),
        ProxKind::Exp => (13f64.powi(4), 2, 1.0, 6.0),
        ProxKind::Ann { .. } => (1200f64 * 1200.0, 2, 2.0, 6.0),
    }
}

/// Theory-mode `(h, N, q)` for `kind` with `Z = 16kM₂/η`. `n` is the
/// dimension of `x` (the epigraph adds one more coordinate for EXP/ANN).
pub fn ps_params(kind: &ProxKind, n: usize, k: u64, m2: f64, eta: f64) -> Result<PsFormula> {
    if n == 0 || k == 0 {
        return Err(usage("ps_params needs n ≥ 1 and k ≥ 1"));
    }
    if !(m2 >= 1.0) || !(eta > 0.0 && eta < 1.0) {
        return Err(usage(format!("ps_params needs M2 ≥ 1 and eta in (0,1), got M2 = {m2}, eta = {eta}")));
    }
    let z = 16.0 * k as f64 * m2 / eta;
    if !(z >= 16.0) {
        return Err(usage(format!("Z = 16kM2/eta = {z} is below 16")));
    }
    let (c, p, mult, cq) = kind_constants(kind);
    let nf = n as f64;
    let lz = z.ln();
    Ok(PsFormula { z, h: 1.0 / (c * nf * nf * lz), n_cap: mult * z * z * lz.powi(p), q_required: cq * lz })
}

/// Smallest `k ≥ 1` with `k ≥ A·ln²(B·k)`: doubling to bracket, then
/// bisection. The result is verified by substitution.
pub fn solve_iteration_count(a: f64, b: f64) -> Result<u64> {
    if !(a > 0.0 && a.is_finite() && b > 0.0 && b.is_finite()) {
        return Err(usage(format!("solve_iteration_count needs A, B > 0, got ({a}, {b})")));
    }
    let ok = |k: u64| {
        let l = (b * k as f64).ln();
        k as f64 >= a * l * l
    };
    if ok(1) {
        return Ok(1);
    }
    let mut hi: u64 = 2;
    let mut rounds = 0;
    while !ok(hi) {
        rounds += 1;
        if rounds > 64 || hi > u64::MAX / 2 {
            return Err(Error::Internal(format!("iteration count for A = {a}, B = {b} did not bracket")));
        }
        hi *= 2;
    }
    let mut lo = hi / 2;
    // invariant: !ok(lo), ok(hi)
    for _ in 0..64 {
        if hi - lo <= 1 {
            break;
        }
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if hi - lo != 1 || !ok(hi) {
        return Err(Error::Internal(format!("iteration count for A = {a}, B = {b} did not converge")));
    }
    Ok(hi)
}

/// One sampler configuration: the practical values used to run, plus the
/// theory values they were derived from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamChoice {
    pub h: f64,
    pub n_cap: u64,
    pub k: u64,
    pub q: f64,
    pub mode: Mode,
    pub theory: TheoryValues,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryValues {
    pub h: f64,
    pub n_cap: f64,
    pub k: u64,
    pub z: f64,
    pub q_required: f64,
    /// Mixing-constant proxy (`λ`, `σ²`, …) entering `A`.
    pub c_mix: f64,
}

/// Parameters for one annealing phase with budget `(η_i, ε_i)`.
///
/// `k` solves `k ≥ A·ln²(Bk)` with `A = c_iter·c_kind·n²·c_mix` and
/// `B = 16M₂/(η_i ε_i)`; `h` and `N` then follow from [`ps_params`].
#[allow(clippy::too_many_arguments)]
pub fn choose_params(
    kind: &ProxKind,
    n: usize,
    c_mix: f64,
    q: f64,
    eta_i: f64,
    eps_i: f64,
    consts: &Constants,
    mode: &Mode,
) -> Result<ParamChoice> {
    if !(c_mix > 0.0 && c_mix.is_finite()) {
        return Err(usage(format!("mixing constant must be positive, got {c_mix}")));
    }
    let (c_kind, ..) = kind_constants(kind);
    let nf = n as f64;
    let a = consts.c_iter * c_kind * nf * nf * c_mix;
    let b = 16.0 * ASSUMED_M2 / (eta_i * eps_i);
    let k = solve_iteration_count(a, b)?;
    let f = ps_params(kind, n, k, ASSUMED_M2, eta_i)?;
    let theory = TheoryValues { h: f.h, n_cap: f.n_cap, k, z: f.z, q_required: f.q_required, c_mix };
    let (h, k_run, n_run) = match *mode {
        Mode::Theory => (f.h, k, f.n_cap.ceil() as u64),
        Mode::Practical { scale_h, scale_k, n_cap } => (
            f.h * scale_h,
            ((k as f64 / scale_k).ceil() as u64).max(1),
            (f.n_cap.ceil() as u64).min(n_cap),
        ),
    };
    Ok(ParamChoice { h, n_cap: n_run.max(1), k: k_run, q, mode: *mode, theory })
}
