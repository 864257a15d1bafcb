use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};
use crate::geometry::Body;
use crate::special::log_norm_interval;

/// Which restricted-Gaussian backward step a chain uses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ProxKind {
    /// Uniform target on `K`.
    Unif,
    /// `γ_{σ²}` restricted to `K`.
    Gauss { sigma2: f64 },
    /// `exp(−n·t)` on an epigraph body of dimension `n + 1`.
    Exp,
    /// `exp(−ρ·t)·γ_{σ²}(x)` on a truncated epigraph body.
    Ann { sigma2: f64, rho: f64 },
}

impl ProxKind {
    pub fn name(&self) -> &'static str {
        match self {
            ProxKind::Unif => "unif",
            ProxKind::Gauss { .. } => "gauss",
            ProxKind::Exp => "exp",
            ProxKind::Ann { .. } => "ann",
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        match *self {
            ProxKind::Gauss { sigma2 } if !(sigma2 > 0.0 && sigma2.is_finite()) => {
                Err(usage(format!("sigma2 must be positive, got {sigma2}")))
            }
            ProxKind::Ann { sigma2, rho } if !(sigma2 > 0.0 && sigma2.is_finite() && rho >= 0.0 && rho.is_finite()) => {
                Err(usage(format!("ann needs sigma2 > 0 and rho ≥ 0, got ({sigma2}, {rho})")))
            }
            _ => Ok(()),
        }
    }
}

/// `y = x + √h·z`, `z ~ N(0, I)`.
pub fn forward_step<R: Rng + ?Sized>(x: &[f64], h: f64, rng: &mut R) -> Vec<f64> {
    debug_assert!(h >= 0.0);
    if h == 0.0 {
        return x.to_vec();
    }
    let s = h.sqrt();
    x.iter().map(|v| v + s * rng.sample::<f64, _>(StandardNormal)).collect()
}

/// A diagonal Gaussian restricted to `body`.
#[derive(Debug, Clone)]
pub struct BackwardProposal<'a> {
    pub mean: Vec<f64>,
    pub var: Vec<f64>,
    pub body: &'a Body,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StepOutcome {
    Accepted { x: Vec<f64>, attempts: u64 },
    Failure { attempts: u64 },
}

/// Builds the backward conditional for `kind` at the forward point `y`.
pub fn make_backward_proposal<'a>(kind: ProxKind, y: &[f64], h: f64, body: &'a Body) -> Result<BackwardProposal<'a>> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(usage(format!("step size h must be positive, got {h}")));
    }
    if y.len() != body.dim() {
        return Err(Error::Dimension { expected: body.dim(), got: y.len() });
    }
    kind.validate()?;
    let d = y.len();
    let (mean, var) = match kind {
        ProxKind::Unif => (y.to_vec(), vec![h; d]),
        ProxKind::Gauss { sigma2 } => {
            let tau = sigma2 / (h + sigma2);
            (y.iter().map(|v| tau * v).collect(), vec![tau * h; d])
        }
        ProxKind::Exp => {
            if d < 2 {
                return Err(usage("exp step needs an epigraph body of dimension ≥ 2"));
            }
            let n = (d - 1) as f64;
            let mut m = y.to_vec();
            m[d - 1] -= h * n;
            (m, vec![h; d])
        }
        ProxKind::Ann { sigma2, rho } => {
            if d < 2 {
                return Err(usage("ann step needs an epigraph body of dimension ≥ 2"));
            }
            let tau = sigma2 / (h + sigma2);
            let mut m: Vec<f64> = y.iter().map(|v| tau * v).collect();
            m[d - 1] = y[d - 1] - rho * h;
            let mut v = vec![tau * h; d];
            v[d - 1] = h;
            (m, v)
        }
    };
    Ok(BackwardProposal { mean, var, body })
}

/// Draws from `prop` until a draw lands in the body, at most `n_cap` times.
/// Every attempt costs one membership query and one rejection trial.
pub fn backward_step<R: Rng + ?Sized>(prop: &BackwardProposal<'_>, n_cap: u64, rng: &mut R) -> Result<StepOutcome> {
    if n_cap == 0 {
        return Err(usage("rejection cap N must be at least 1"));
    }
    let sd: Vec<f64> = prop.var.iter().map(|v| v.sqrt()).collect();
    let mut x = vec![0.0; prop.mean.len()];
    let mut attempts = 0;
    let result = loop {
        if attempts == n_cap {
            break StepOutcome::Failure { attempts };
        }
        attempts += 1;
        for ((xi, m), s) in x.iter_mut().zip(&prop.mean).zip(&sd) {
            *xi = m + s * rng.sample::<f64, _>(StandardNormal);
        }
        match prop.body.contains(&x) {
            Ok(true) => break StepOutcome::Accepted { x, attempts },
            Ok(false) => {}
            Err(e) => {
                prop.body.ledger().record_trials(attempts);
                return Err(e);
            }
        }
    };
    prop.body.ledger().record_trials(attempts);
    Ok(result)
}

/// `ℓ(y) = P(N(y, hI) ∈ Π[lo_i, hi_i])`, accumulated in the log domain.
pub fn exact_local_conductance_box(y: &[f64], h: f64, lo: &[f64], hi: &[f64]) -> f64 {
    if h == 0.0 {
        let inside = y.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| a <= v && v <= b);
        return if inside { 1.0 } else { 0.0 };
    }
    let s = h.sqrt();
    y.iter()
        .zip(lo.iter().zip(hi))
        .map(|(v, (a, b))| log_norm_interval((a - v) / s, (b - v) / s))
        .sum::<f64>()
        .exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use crate::special::norm_cdf;

    #[test]
    fn forward_step_moments_and_determinism() {
        let mut rng = stream_rng(11, 0);
        assert_eq!(forward_step(&[1.5, -2.0], 0.0, &mut rng), vec![1.5, -2.0]);
        let m = 100_000;
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..m {
            let y = forward_step(&[0.0], 1.0, &mut rng);
            s1 += y[0];
            s2 += y[0] * y[0];
        }
        let mean = s1 / m as f64;
        let var = s2 / m as f64 - mean * mean;
        assert!(mean.abs() < 0.02, "{mean}");
        assert!((0.97..=1.03).contains(&var), "{var}");
        let a = forward_step(&[0.0; 4], 0.3, &mut stream_rng(5, 1));
        let b = forward_step(&[0.0; 4], 0.3, &mut stream_rng(5, 1));
        assert_eq!(a, b);
    }

    #[test]
    fn proposal_examples() {
        let b2 = Body::whole_space(2).unwrap();
        let p = make_backward_proposal(ProxKind::Gauss { sigma2: 1.0 }, &[2.0, 0.0], 1.0, &b2).unwrap();
        assert_eq!(p.mean, vec![1.0, 0.0]);
        assert_eq!(p.var, vec![0.5, 0.5]);
        let b4 = Body::whole_space(4).unwrap();
        let p = make_backward_proposal(ProxKind::Exp, &[1.0; 4], 0.01, &b4).unwrap();
        assert_eq!(&p.mean[..3], &[1.0; 3]);
        assert!((p.mean[3] - 0.97).abs() < 1e-15);
        let p = make_backward_proposal(ProxKind::Gauss { sigma2: 1.0 }, &[2.0, 3.0], 1e-12, &b2).unwrap();
        assert!((p.mean[0] - 2.0).abs() < 1e-11 && (p.mean[1] - 3.0).abs() < 1e-11);
        let p = make_backward_proposal(ProxKind::Ann { sigma2: 3.0, rho: 2.0 }, &[2.0, 1.0], 1.0, &b2).unwrap();
        assert_eq!(p.mean, vec![1.5, -1.0]);
        assert_eq!(p.var, vec![0.75, 1.0]);
        assert!(make_backward_proposal(ProxKind::Unif, &[0.0, 0.0], 0.0, &b2).is_err());
        assert!(make_backward_proposal(ProxKind::Unif, &[0.0], 1.0, &b2).is_err());
    }

    #[test]
    fn whole_space_accepts_first_attempt() {
        let b = Body::whole_space(3).unwrap();
        let p = make_backward_proposal(ProxKind::Unif, &[0.0; 3], 5.0, &b).unwrap();
        match backward_step(&p, 1, &mut stream_rng(1, 0)).unwrap() {
            StepOutcome::Accepted { attempts, .. } => assert_eq!(attempts, 1),
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn interval_mean_attempts_near_one() {
        let b = Body::axis_box(vec![0.0], vec![1.0]).unwrap();
        // ℓ = Φ(5) − Φ(−5)
        let ell = norm_cdf(5.0) - norm_cdf(-5.0);
        assert!(ell > 0.99999);
        let mut rng = stream_rng(2, 0);
        let prop = make_backward_proposal(ProxKind::Unif, &[0.5], 0.01, &b).unwrap();
        let reps = 10_000;
        let mut total = 0;
        for _ in 0..reps {
            match backward_step(&prop, 100, &mut rng).unwrap() {
                StepOutcome::Accepted { x, attempts } => {
                    assert!((0.0..=1.0).contains(&x[0]));
                    total += attempts;
                }
                StepOutcome::Failure { .. } => panic!("unexpected failure"),
            }
        }
        let mean = total as f64 / reps as f64;
        assert!((mean - 1.0 / ell).abs() < 0.01 / ell);
        assert_eq!(b.ledger().rejection_trials(), total);
        assert_eq!(b.ledger().membership_queries(), total);
    }

    #[test]
    fn far_proposal_fails() {
        let b = Body::axis_box(vec![0.0], vec![1.0]).unwrap();
        let prop = make_backward_proposal(ProxKind::Unif, &[10.0], 0.01, &b).unwrap();
        assert_eq!(
            backward_step(&prop, 50, &mut stream_rng(3, 0)).unwrap(),
            StepOutcome::Failure { attempts: 50 }
        );
        assert_eq!(b.ledger().membership_queries(), 50);
    }

    #[test]
    fn conductance_examples() {
        let c = exact_local_conductance_box(&[0.0], 1e-8, &[-1.0], &[1.0]);
        assert!((c - 1.0).abs() < 1e-15);
        let want = norm_cdf(0.0) - norm_cdf(-2.0);
        let c1 = exact_local_conductance_box(&[1.0], 1.0, &[-1.0], &[1.0]);
        assert!((c1 - want).abs() < 1e-14 && (c1 - 0.47725).abs() < 1e-5);
        let c2 = exact_local_conductance_box(&[1.0, 1.0], 1.0, &[-1.0, -1.0], &[1.0, 1.0]);
        assert!((c2 - want * want).abs() < 1e-14 && (c2 - 0.22777).abs() < 1e-5);
    }
}
