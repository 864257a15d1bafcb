use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{usage, Error, Result};
use crate::geometry::{Body, Potential};

/// Rejection cap for the cold-start initializers.
pub const INIT_ATTEMPT_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct InitDraw {
    pub point: Vec<f64>,
    pub attempts: u64,
}

/// `N(x0, I/n)` restricted to `body` by rejection, `x0` the body's center.
pub fn init_rejection_gaussian<R: Rng + ?Sized>(body: &Body, rng: &mut R) -> Result<InitDraw> {
    init_rejection_gaussian_at(body, body.center(), rng)
}

/// `N(mean, I/n)` restricted to `body` by rejection.
pub fn init_rejection_gaussian_at<R: Rng + ?Sized>(body: &Body, mean: &[f64], rng: &mut R) -> Result<InitDraw> {
    let n = body.dim();
    if mean.len() != n {
        return Err(Error::Dimension { expected: n, got: mean.len() });
    }
    let s = 1.0 / (n as f64).sqrt();
    let mut z = vec![0.0; n];
    for attempts in 1..=INIT_ATTEMPT_CAP {
        for (zi, m) in z.iter_mut().zip(mean) {
            *zi = m + s * rng.sample::<f64, _>(StandardNormal);
        }
        if body.contains(&z)? {
            body.ledger().record_trials(attempts);
            return Ok(InitDraw { point: z, attempts });
        }
    }
    body.ledger().record_trials(INIT_ATTEMPT_CAP);
    Err(Error::Config(format!(
        "initial rejection sampling exceeded {INIT_ATTEMPT_CAP} attempts; the body likely does not contain the declared inner ball"
    )))
}

/// `exp(−(n/2)‖x‖²)` restricted to a truncated epigraph `K̄` by rejection
/// from `N(0, I/n) ⊗ Unif(t-range)`.
pub fn init_rejection_tgc<R: Rng + ?Sized>(k_bar: &Body, rng: &mut R) -> Result<InitDraw> {
    let (t_lo, t_hi) = k_bar
        .t_range()
        .ok_or_else(|| usage("init_rejection_tgc needs a truncated epigraph body"))?;
    let d = k_bar.dim();
    let n = d - 1;
    let s = 1.0 / (n as f64).sqrt();
    let mut z = vec![0.0; d];
    for attempts in 1..=INIT_ATTEMPT_CAP {
        for zi in z[..n].iter_mut() {
            *zi = s * rng.sample::<f64, _>(StandardNormal);
        }
        z[n] = t_lo + (t_hi - t_lo) * rng.random::<f64>();
        if k_bar.contains(&z)? {
            k_bar.ledger().record_trials(attempts);
            return Ok(InitDraw { point: z, attempts });
        }
    }
    k_bar.ledger().record_trials(INIT_ATTEMPT_CAP);
    Err(Error::Config(format!("tilted initializer exceeded {INIT_ATTEMPT_CAP} attempts")))
}

/// `(x, t)` with `t = V(x)/n − ln(1−u)/n`, i.e. `t | x` distributed as
/// `e^{−nt}` on `[V(x)/n, ∞)`.
pub fn lift_to_epigraph<R: Rng + ?Sized>(x: &[f64], pot: &Potential, rng: &mut R) -> Result<Vec<f64>> {
    lift_to_epigraph_with(x, pot, rng.random::<f64>())
}

/// [`lift_to_epigraph`] with an explicit uniform `u ∈ [0, 1)`.
pub fn lift_to_epigraph_with(x: &[f64], pot: &Potential, u: f64) -> Result<Vec<f64>> {
    let v = pot.evaluate(x)?;
    if !v.is_finite() {
        return Err(usage(format!("cannot lift a point with V = {v}")));
    }
    let n = x.len() as f64;
    let mut z = x.to_vec();
    z.push(v / n - (-u).ln_1p() / n);
    Ok(z)
}

/// Drops the `t` coordinate.
pub fn x_marginal(z: &[f64]) -> Vec<f64> {
    z[..z.len().saturating_sub(1)].to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::ks_1d;
    use crate::geometry::{epigraph_body, truncate_for_logconcave};
    use crate::rng::stream_rng;

    #[test]
    fn ball_init_attempts_match_radial_mass() {
        // n = 2, N(0, I/2): P(‖Z‖ ≤ 1) = 1 − e^{−1}
        let body = Body::ball(vec![0.0; 2], 1.0).unwrap();
        let mut rng = stream_rng(3, 0);
        let reps = 10_000;
        let mut total = 0;
        for _ in 0..reps {
            let d = init_rejection_gaussian(&body, &mut rng).unwrap();
            assert!(d.point.iter().map(|v| v * v).sum::<f64>() <= 1.0);
            total += d.attempts;
        }
        let want = 1.0 / (1.0 - (-1.0f64).exp());
        let got = total as f64 / reps as f64;
        assert!((got - want).abs() < 0.05 * want, "{got} vs {want}");
        assert_eq!(body.ledger().membership_queries(), total);
    }

    #[test]
    fn huge_body_accepts_immediately() {
        let body = Body::ball(vec![0.0; 5], 10.0).unwrap();
        let mut rng = stream_rng(4, 0);
        for _ in 0..1000 {
            assert_eq!(init_rejection_gaussian(&body, &mut rng).unwrap().attempts, 1);
        }
    }

    #[test]
    fn tgc_init_contract() {
        let pot = Potential::quadratic(vec![0.0; 2], 1.0).unwrap();
        let kb = truncate_for_logconcave(&epigraph_body(&pot).unwrap(), pot.r_bound(), 0.5).unwrap();
        let (lo, hi) = kb.t_range().unwrap();
        let l = (4.0 * std::f64::consts::E).ln();
        assert!((hi - lo - (13.0 * l + 15.0)).abs() < 1e-12);
        let mut rng = stream_rng(5, 0);
        for _ in 0..200 {
            let z = init_rejection_tgc(&kb, &mut rng).unwrap().point;
            assert!(z[2] >= lo && z[2] <= hi);
            assert!(pot.evaluate(&z[..2]).unwrap() <= 2.0 * z[2]);
        }
    }

    #[test]
    fn lift_examples() {
        let pot = Potential::new(4, vec![0.0; 4], 1.0, |_| 2.0).unwrap();
        let z = lift_to_epigraph_with(&[0.0; 4], &pot, 0.0).unwrap();
        assert_eq!(z[4], 0.5);
        let z = lift_to_epigraph_with(&[0.0; 4], &pot, 1.0 - (-1.0f64).exp()).unwrap();
        assert!((z[4] - 0.75).abs() < 1e-15);
        assert_eq!(x_marginal(&z), vec![0.0; 4]);
        assert_eq!(x_marginal(&[1.0, 2.0, 0.3]), vec![1.0, 2.0]);
        let ind = Potential::indicator(&Body::ball(vec![0.0], 1.0).unwrap()).unwrap();
        assert!(lift_to_epigraph_with(&[3.0], &ind, 0.5).is_err());
    }

    #[test]
    fn lift_residual_is_exponential() {
        let pot = Potential::quadratic(vec![0.0; 3], 1.0).unwrap();
        let mut rng = stream_rng(6, 0);
        let x = [0.3, -1.0, 2.0];
        let v = pot.evaluate(&x).unwrap();
        let r: Vec<f64> = (0..100_000)
            .map(|_| {
                let z = lift_to_epigraph(&x, &pot, &mut rng).unwrap();
                3.0 * (z[3] - v / 3.0)
            })
            .collect();
        assert!(ks_1d(&r, |s| 1.0 - (-s).exp()) < 0.01);
    }
}
