use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};
use crate::geometry::random_unit;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub count: usize,
    pub mean: Vec<f64>,
    pub mean_se: Vec<f64>,
    /// Per-coordinate raw second moment `E[X_i²]`.
    pub second_moment: Vec<f64>,
    pub second_moment_se: Vec<f64>,
    /// Unbiased per-coordinate variance.
    pub variance: Vec<f64>,
    pub sq_norm: f64,
    pub sq_norm_se: f64,
}

fn mean_and_se(values: impl Iterator<Item = f64> + Clone, n: f64) -> (f64, f64) {
    let m = values.clone().sum::<f64>() / n;
    let v = values.map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

/// Means, second moments and `E‖X‖²` with standard errors (i.i.d. formula).
pub fn empirical_moments(samples: &[Vec<f64>]) -> Result<Moments> {
    if samples.len() < 2 {
        return Err(usage("empirical_moments needs at least 2 samples"));
    }
    let d = samples[0].len();
    if samples.iter().any(|s| s.len() != d) {
        return Err(usage("samples have inconsistent dimensions"));
    }
    let n = samples.len() as f64;
    let mut out = Moments {
        count: samples.len(),
        mean: vec![0.0; d],
        mean_se: vec![0.0; d],
        second_moment: vec![0.0; d],
        second_moment_se: vec![0.0; d],
        variance: vec![0.0; d],
        sq_norm: 0.0,
        sq_norm_se: 0.0,
    };
    for i in 0..d {
        let (m, se) = mean_and_se(samples.iter().map(|s| s[i]), n);
        let (m2, se2) = mean_and_se(samples.iter().map(|s| s[i] * s[i]), n);
        out.mean[i] = m;
        out.mean_se[i] = se;
        out.second_moment[i] = m2;
        out.second_moment_se[i] = se2;
        out.variance[i] = samples.iter().map(|s| (s[i] - m) * (s[i] - m)).sum::<f64>() / (n - 1.0);
    }
    let (sn, sn_se) = mean_and_se(samples.iter().map(|s| s.iter().map(|v| v * v).sum::<f64>()), n);
    out.sq_norm = sn;
    out.sq_norm_se = sn_se;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceEstimate {
    pub n_samples: usize,
    pub lambda: f64,
    pub eigenvector: Vec<f64>,
    /// Top eigenvalue after deflating the first.
    pub second_eigenvalue: f64,
    /// `‖Σv − λv‖` at the last iteration (for unit `v`).
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Exactly rounded running sum (Shewchuk's partials). Sums of duplicated
/// data are then exact multiples, which keeps estimators bit-stable.
#[derive(Debug, Default, Clone)]
struct ExactSum {
    partials: Vec<f64>,
}

impl ExactSum {
    fn add(&mut self, mut x: f64) {
        let mut i = 0;
        for j in 0..self.partials.len() {
            let mut y = self.partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                self.partials[i] = lo;
                i += 1;
            }
            x = hi;
        }
        self.partials.truncate(i);
        self.partials.push(x);
    }

    fn value(&self) -> f64 {
        let p = &self.partials;
        let Some(mut n) = p.len().checked_sub(1) else {
            return 0.0;
        };
        let mut hi = p[n];
        let mut lo = 0.0;
        while n > 0 {
            n -= 1;
            let x = hi;
            let y = p[n];
            hi = x + y;
            lo = y - (hi - x);
            if lo != 0.0 {
                break;
            }
        }
        // round-half-even correction across the remaining partials
        if n > 0 && ((lo < 0.0 && p[n - 1] < 0.0) || (lo > 0.0 && p[n - 1] > 0.0)) {
            let y = lo * 2.0;
            let x = hi + y;
            if y == x - hi {
                hi = x;
            }
        }
        hi
    }
}

/// Plug-in (`1/N`) covariance with exactly rounded sums.
pub fn covariance_matrix(samples: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let d = samples[0].len();
    let n = samples.len() as f64;
    let mut acc = vec![ExactSum::default(); d];
    for s in samples {
        for (a, v) in acc.iter_mut().zip(s) {
            a.add(*v);
        }
    }
    let mean: Vec<f64> = acc.iter().map(|a| a.value() / n).collect();
    let mut c = vec![vec![0.0; d]; d];
    let mut acc = vec![ExactSum::default(); d * (d + 1) / 2];
    for s in samples {
        let mut idx = 0;
        for i in 0..d {
            let di = s[i] - mean[i];
            for j in i..d {
                acc[idx].add(di * (s[j] - mean[j]));
                idx += 1;
            }
        }
    }
    let mut idx = 0;
    for i in 0..d {
        for j in i..d {
            c[i][j] = acc[idx].value() / n;
            c[j][i] = c[i][j];
            idx += 1;
        }
    }
    c
}

fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

fn power_iteration(m: &[Vec<f64>], max_iter: usize) -> (f64, Vec<f64>, f64, usize, bool) {
    let d = m.len();
    // Deterministic start with distinct entries so it is not orthogonal to
    // an axis-aligned top eigenvector.
    let mut v: Vec<f64> = (0..d).map(|i| 1.0 + 0.1 * i as f64).collect();
    let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= nv);
    let mut lambda = 0.0;
    let mut residual = f64::INFINITY;
    for it in 1..=max_iter {
        let w = mat_vec(m, &v);
        lambda = w.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>();
        residual = w.iter().zip(&v).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt();
        if residual < 1e-8 {
            return (lambda, v, residual, it, true);
        }
        let nw = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nw == 0.0 {
            return (0.0, v, 0.0, it, true);
        }
        v = w.into_iter().map(|x| x / nw).collect();
    }
    (lambda, v, residual, max_iter, false)
}

/// Operator norm of the empirical covariance by power iteration (residual
/// `< 1e-8` or `10⁴` iterations), plus the second eigenvalue by deflation.
pub fn cov_opnorm(samples: &[Vec<f64>]) -> Result<CovarianceEstimate> {
    if samples.is_empty() {
        return Err(usage("cov_opnorm needs samples"));
    }
    let d = samples[0].len();
    if samples.len() < d + 1 {
        return Err(usage(format!("cov_opnorm needs at least n + 1 = {} samples", d + 1)));
    }
    let c = covariance_matrix(samples);
    let (lambda, v, residual, iterations, converged) = power_iteration(&c, 10_000);
    let mut deflated = c.clone();
    for i in 0..d {
        for j in 0..d {
            deflated[i][j] -= lambda * v[i] * v[j];
        }
    }
    let (second, ..) = power_iteration(&deflated, 10_000);
    Ok(CovarianceEstimate {
        n_samples: samples.len(),
        lambda: lambda.max(0.0),
        eigenvector: v,
        second_eigenvalue: second.max(0.0),
        residual,
        iterations,
        converged,
    })
}

/// `sup |F_emp − F|` over the sorted sample.
pub fn ks_1d(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in xs.iter().enumerate() {
        let f = cdf(*x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    d
}

/// `sup_k |F_emp(k) − F(k)|` for integer-valued samples.
pub fn ks_discrete(samples: &[u64], cdf: impl Fn(u64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_unstable();
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        let k = xs[i];
        // F just below k
        d = d.max((i as f64 / n - cdf(k.saturating_sub(1))).abs());
        while i < xs.len() && xs[i] == k {
            i += 1;
        }
        d = d.max((i as f64 / n - cdf(k)).abs());
    }
    d
}

/// Exact uniform draw from `Π[lo_i, hi_i]`.
pub fn uniform_box<R: Rng + ?Sized>(lo: &[f64], hi: &[f64], rng: &mut R) -> Vec<f64> {
    lo.iter().zip(hi).map(|(a, b)| a + (b - a) * rng.random::<f64>()).collect()
}

/// Exact uniform draw from `B_radius(center)`.
pub fn uniform_ball<R: Rng + ?Sized>(center: &[f64], radius: f64, rng: &mut R) -> Vec<f64> {
    let n = center.len();
    let u = random_unit(rng, n);
    let r = radius * rng.random::<f64>().powf(1.0 / n as f64);
    center.iter().zip(&u).map(|(c, d)| c + r * d).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RejectionOutput {
    pub samples: Vec<Vec<f64>>,
    pub trials: u64,
}

impl RejectionOutput {
    pub fn acceptance_rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.samples.len() as f64 / self.trials as f64
        }
    }
}

/// Exact i.i.d. draws from `exp(log_target)` by accept–reject against a
/// proposal with `log_target ≤ log_envelope + log_proposal`. A proposal
/// point that violates the envelope invalidates the oracle.
pub fn reference_rejection_sampler<R, T, S, P>(
    log_target: T,
    mut sample_proposal: S,
    log_proposal: P,
    log_envelope: f64,
    rng: &mut R,
    count: usize,
    max_trials: u64,
) -> Result<RejectionOutput>
where
    R: Rng + ?Sized,
    T: Fn(&[f64]) -> f64,
    S: FnMut(&mut R) -> Vec<f64>,
    P: Fn(&[f64]) -> f64,
{
    let mut samples = Vec::with_capacity(count);
    let mut trials = 0;
    while samples.len() < count {
        if trials >= max_trials {
            return Err(Error::Config(format!("rejection sampler exceeded {max_trials} trials")));
        }
        trials += 1;
        let x = sample_proposal(rng);
        let lt = log_target(&x);
        if lt == f64::NEG_INFINITY {
            continue;
        }
        let log_ratio = lt - log_proposal(&x) - log_envelope;
        if log_ratio > 1e-12 {
            return Err(Error::Oracle(format!("envelope violated at {x:?} (log ratio {log_ratio})")));
        }
        if rng.random::<f64>().ln() <= log_ratio {
            samples.push(x);
        }
    }
    Ok(RejectionOutput { samples, trials })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use crate::special::norm_cdf;
    use rand_distr::StandardNormal;

    #[test]
    fn moments_examples() {
        let c = vec![vec![2.0, -1.0]; 5];
        let m = empirical_moments(&c).unwrap();
        assert_eq!(m.variance, vec![0.0, 0.0]);
        let two = vec![vec![-1.0], vec![1.0]];
        let m = empirical_moments(&two).unwrap();
        assert_eq!((m.mean[0], m.second_moment[0]), (0.0, 1.0));
        assert!(empirical_moments(&[]).is_err());
    }

    #[test]
    fn exact_cube_moments() {
        let mut rng = stream_rng(4, 0);
        let s: Vec<Vec<f64>> = (0..100_000).map(|_| uniform_box(&[-1.0; 5], &[1.0; 5], &mut rng)).collect();
        let m = empirical_moments(&s).unwrap();
        for i in 0..5 {
            assert!((m.second_moment[i] - 1.0 / 3.0).abs() <= 3.0 * m.second_moment_se[i]);
        }
    }

    #[test]
    fn ball_and_cube_declared_r_is_sound() {
        use crate::geometry::Body;
        let mut rng = stream_rng(8, 0);
        let ball = Body::ball(vec![0.0; 4], 1.5).unwrap();
        let s: Vec<Vec<f64>> = (0..50_000).map(|_| uniform_ball(&[0.0; 4], 1.5, &mut rng)).collect();
        let m = empirical_moments(&s).unwrap();
        assert!(m.sq_norm <= ball.r_bound().unwrap().powi(2) + 3.0 * m.sq_norm_se);
        let cube = Body::axis_box(vec![-1.0, 0.0, 2.0], vec![1.0, 3.0, 2.5]).unwrap();
        let (lo, hi) = cube.box_bounds().unwrap();
        let c = cube.center().to_vec();
        let s: Vec<Vec<f64>> = (0..50_000)
            .map(|_| uniform_box(lo, hi, &mut rng).iter().zip(&c).map(|(x, y)| x - y).collect())
            .collect();
        let m = empirical_moments(&s).unwrap();
        assert!(m.sq_norm <= cube.r_bound().unwrap().powi(2) + 3.0 * m.sq_norm_se);
    }

    #[test]
    fn isotropic_gaussian_opnorm() {
        let mut rng = stream_rng(5, 0);
        let s: Vec<Vec<f64>> = (0..100_000).map(|_| (0..5).map(|_| rng.sample(StandardNormal)).collect()).collect();
        let e = cov_opnorm(&s).unwrap();
        assert!((0.95..=1.05).contains(&e.lambda), "{}", e.lambda);
        assert!(e.converged && e.residual < 1e-8);
    }

    #[test]
    fn segment_is_rank_one() {
        let mut rng = stream_rng(6, 0);
        let dir = [1.0 / 3f64.sqrt(); 3];
        let s: Vec<Vec<f64>> = (0..20_000)
            .map(|_| {
                let t: f64 = 2.0 * rng.random::<f64>() - 1.0;
                dir.iter().map(|d| t * d).collect()
            })
            .collect();
        let e = cov_opnorm(&s).unwrap();
        let ts: Vec<f64> = s.iter().map(|x| x.iter().zip(&dir).map(|(a, b)| a * b).sum()).collect();
        let mt = ts.iter().sum::<f64>() / ts.len() as f64;
        let var = ts.iter().map(|t| (t - mt).powi(2)).sum::<f64>() / ts.len() as f64;
        assert!((e.lambda - var).abs() < 1e-9);
        assert!(e.second_eigenvalue < 1e-9);
        let mut doubled = s.clone();
        doubled.extend(s.iter().cloned());
        assert_eq!(cov_opnorm(&doubled).unwrap().lambda, e.lambda);
    }

    #[test]
    fn exact_sum_is_exact() {
        let mut a = ExactSum::default();
        for v in [1e100, 1.0, -1e100, 1e-20, 3.0] {
            a.add(v);
        }
        assert_eq!(a.value(), 4.0 + 1e-20);
        let mut b = ExactSum::default();
        for _ in 0..10 {
            b.add(0.1);
        }
        assert_eq!(b.value(), 1.0);
    }

    #[test]
    fn ks_examples() {
        let mut rng = stream_rng(7, 0);
        let s: Vec<f64> = (0..100_000).map(|_| rng.sample(StandardNormal)).collect();
        assert!(ks_1d(&s, norm_cdf) < 1.95 / 100_000f64.sqrt());
        assert!(ks_1d(&[0.0; 10], norm_cdf) >= 0.5);
        let a = ks_1d(&s, norm_cdf);
        let t: Vec<f64> = s.iter().map(|x| 3.0 * x - 1.0).collect();
        let b = ks_1d(&t, |y| norm_cdf((y + 1.0) / 3.0));
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn rejection_sampler_examples() {
        let mut rng = stream_rng(8, 1);
        let out = reference_rejection_sampler(
            |x: &[f64]| if x.iter().map(|v| v * v).sum::<f64>() <= 1.0 { 0.0 } else { f64::NEG_INFINITY },
            |r: &mut crate::rng::SamplerRng| uniform_box(&[-1.0; 2], &[1.0; 2], r),
            |_| 0.0,
            0.0,
            &mut rng,
            78_540,
            10_000_000,
        )
        .unwrap();
        assert!((out.acceptance_rate() - std::f64::consts::FRAC_PI_4).abs() < 0.01);
        let tn = reference_rejection_sampler(
            |x: &[f64]| -0.5 * x[0] * x[0],
            |r: &mut crate::rng::SamplerRng| vec![r.random::<f64>()],
            |_| 0.0,
            0.0,
            &mut rng,
            100_000,
            10_000_000,
        )
        .unwrap();
        let z = norm_cdf(1.0) - 0.5;
        let xs: Vec<f64> = tn.samples.iter().map(|v| v[0]).collect();
        assert!(ks_1d(&xs, |x| (norm_cdf(x) - 0.5) / z) < 0.01);
        let none = reference_rejection_sampler(|_| 0.0, |_: &mut crate::rng::SamplerRng| vec![0.0], |_| 0.0, 0.0, &mut rng, 0, 1).unwrap();
        assert!(none.samples.is_empty());
        let bad = reference_rejection_sampler(|_| 1.0, |_: &mut crate::rng::SamplerRng| vec![0.0], |_| 0.0, 0.0, &mut rng, 1, 10);
        assert!(matches!(bad, Err(Error::Oracle(_))));
    }
}
