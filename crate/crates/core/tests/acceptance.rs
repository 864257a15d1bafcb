//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the PASS/FAIL table always shows up in `cargo test` output; exits non-zero
//! if any criterion fails.

use std::time::{Duration, Instant};

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde_json::json;

use lcsamp::cli::{execute, RunConfig};
use lcsamp::diagnostics::{
    cov_weight_experiment, empirical_moments, global_alpha_grid, ks_1d, log_integrate, reference_rejection_sampler,
    trial_count_check, uniform_ball, uniform_box, AnnealingCase, CovExperimentConfig, Potential1D,
};
use lcsamp::geometry::{Body, Potential};
use lcsamp::pipelines::{
    lift_to_epigraph, sample_logconcave_cold, sample_std_gaussian_cold, sample_uniform_cold, PipelineConfig,
    PipelineReport,
};
use lcsamp::proximal::{backward_step, run_chain, BackwardProposal, ChainOptions, ProxKind, ProxParams, StepOutcome};
use lcsamp::rng::{replica_seed, stream_rng};
use lcsamp::schedule::{ps_params, PipelineKind, PlanSettings};
use lcsamp::special::norm_cdf;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

type Criterion = (u32, &'static str, u64, fn() -> Outcome);

const CRITERIA: [Criterion; 12] = [
    (1, "ps_params formulas", 1, formula_exactness),
    (2, "global annealing bound", 10, global_annealing_domination),
    (3, "variance annealing bound", 10, variance_annealing_domination),
    (4, "backward-step law", 5, backward_step_law),
    (5, "trial-count law", 5, trial_count_law),
    (6, "PS_unif stationarity", 60, unif_stationarity),
    (7, "PS_gauss law", 60, gauss_law),
    (8, "cold-start uniform", 300, cold_start_uniform),
    (9, "cold-start truncated Gaussian", 180, cold_start_std_gaussian),
    (10, "logconcave via epigraph", 300, logconcave_pipeline),
    (11, "covariance weight", 180, covariance_weight),
    (12, "determinism", 60, determinism),
];

fn main() {
    let mut failed = 0;
    for (id, name, budget_s, f) in CRITERIA {
        let start = Instant::now();
        let out = f();
        let took = start.elapsed();
        let in_time = took <= Duration::from_secs(budget_s);
        let pass = out.pass && in_time;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {id:>2} {name:<30} {}  {:.2}s/{budget_s}s  {}",
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            out.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", CRITERIA.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn formula_exactness() -> Outcome {
    // independent transcription of the four step-size / cap / order rules
    let mut rng = stream_rng(101, 0);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    while count < 100 {
        let n = rng.random_range(1..200usize);
        let k = rng.random_range(1..100_000u64);
        let m2 = rng.random_range(1.0..10.0);
        let eta = rng.random_range(1e-4..0.999);
        let z = 16.0 * k as f64 * m2 / eta;
        if z < 16.0 {
            continue;
        }
        count += 1;
        let l = z.ln();
        let n2 = (n * n) as f64;
        let cases = [
            (ProxKind::Unif, 1.0 / (2.0 * n2 * l), z * z * l.powi(4), 12.0 * l),
            (ProxKind::Gauss { sigma2: 1.0 }, 1.0 / (10.0 * n2 * l), z * z * l.powi(3), 6.0 * l),
            (ProxKind::Exp, 1.0 / (13f64.powi(4) * n2 * l), z * z * l * l, 6.0 * l),
            (ProxKind::Ann { sigma2: 1.0, rho: 0.0 }, 1.0 / (1200f64.powi(2) * n2 * l), 2.0 * z * z * l * l, 6.0 * l),
        ];
        for (kind, h, cap, q) in cases {
            let p = ps_params(&kind, n, k, m2, eta).unwrap();
            worst = worst.max(rel(p.h, h)).max(rel(p.n_cap, cap)).max(rel(p.z, z));
            worst = worst.max(rel(p.q_required, q));
        }
    }
    // spot value: UNIF, n=10, k=1000, M2=2, η=0.01
    let p = ps_params(&ProxKind::Unif, 10, 1000, 2.0, 0.01).unwrap();
    let spot = (p.h - 3.34e-4).abs() < 0.01e-4;
    let below = ps_params(&ProxKind::Unif, 10, 1, 1.0, 0.999).is_err() == (16.0 / 0.999 < 16.0);
    outcome(worst <= 4.0 * f64::EPSILON && spot && below, format!("max rel err {worst:.1e}, spot h {:.4e}", p.h))
}

fn global_annealing_domination() -> Outcome {
    let mut rng = stream_rng(202, 0);
    let mut rows = 0;
    let mut worst_gap = f64::NEG_INFINITY;
    for _ in 0..20 {
        let pot = Potential1D::random(&mut rng);
        for q in [2.0, 3.0, 5.0] {
            for (alpha, delta) in global_alpha_grid(q) {
                let r = AnnealingCase::Global { potential: pot.clone(), q, alpha, delta }.check().unwrap();
                rows += 1;
                worst_gap = worst_gap.max(r.quadrature - r.bound);
            }
        }
    }
    let inst = AnnealingCase::Global { potential: Potential1D::laplace(), q: 2.0, alpha: 0.2, delta: 0.0 }
        .check()
        .unwrap();
    let closed = ((2.0 / 1.4) * 2.0 / (2.0f64 / 1.2).powi(2)).ln();
    let inst_ok = (inst.quadrature - closed).abs() < 1e-6 && inst.quadrature <= 0.04 && (closed - 0.0282).abs() < 1e-4;
    outcome(
        worst_gap <= 1e-6 && inst_ok,
        format!("{rows} rows, max(quad − bound) {worst_gap:.3e}; Laplace instance {:.6} vs {closed:.6}", inst.quadrature),
    )
}

fn variance_annealing_domination() -> Outcome {
    let mut worst_gap = f64::NEG_INFINITY;
    let mut rows = 0;
    for sigma2 in [0.25, 1.0] {
        for alpha in [0.05, 0.1] {
            for q in [2.0, 4.0] {
                let r = AnnealingCase::Variance { lo: -1.0, hi: 1.0, radius: 2.0, sigma2, q, alpha }.check().unwrap();
                let want = q * 4.0 * alpha * alpha / sigma2;
                if (r.bound - want).abs() > 1e-15 {
                    return outcome(false, format!("bound {} ≠ qR²α²/σ² = {want}", r.bound));
                }
                rows += 1;
                worst_gap = worst_gap.max(r.quadrature - r.bound);
            }
        }
    }
    outcome(worst_gap <= 1e-6, format!("{rows} rows, max(quad − bound) {worst_gap:.3e}"))
}

fn backward_step_law() -> Outcome {
    let body = Body::axis_box(vec![0.0], vec![1.0]).unwrap();
    let prop = BackwardProposal { mean: vec![0.5], var: vec![0.1], body: &body };
    let mut rng = stream_rng(404, 0);
    let mut xs = Vec::with_capacity(100_000);
    while xs.len() < 100_000 {
        match backward_step(&prop, 1_000, &mut rng).unwrap() {
            StepOutcome::Accepted { x, .. } => xs.push(x[0]),
            StepOutcome::Failure { .. } => return outcome(false, "cap hit"),
        }
    }
    let s = 0.1f64.sqrt();
    let (lo, hi) = (norm_cdf(-0.5 / s), norm_cdf(0.5 / s));
    let ks = ks_1d(&xs, |x| ((norm_cdf((x - 0.5) / s) - lo) / (hi - lo)).clamp(0.0, 1.0));
    outcome(ks < 0.01, format!("KS {ks:.4} at 1e5 draws"))
}

fn trial_count_law() -> Outcome {
    let r = trial_count_check(&[-1.0], &[1.0], &[1.0], 1.0, 10_000, &mut stream_rng(505, 0)).unwrap();
    // ℓ = Φ(0) − Φ(−2)
    let ell_ok = (1.0 / r.expected_attempts - 0.47725).abs() < 1e-5;
    let mean_err = rel(r.mean_attempts, 1.0 / 0.47725);
    outcome(
        ell_ok && mean_err <= 0.05 && r.ks_geometric < 0.02,
        format!("mean {:.4} vs {:.4} ({:.2}%), KS {:.4}", r.mean_attempts, 1.0 / 0.47725, 100.0 * mean_err, r.ks_geometric),
    )
}

fn unif_stationarity() -> Outcome {
    // 32 independent replicas pooled; a single chain at h = 1e-2 has only a
    // few hundred effective draws per coordinate
    let n = 10;
    let cube = Body::cube(n, 1.0).unwrap();
    let chains: Vec<Vec<Vec<f64>>> = (0..32u64)
        .into_par_iter()
        .map(|i| {
            let seed = replica_seed(606, i);
            let x0 = uniform_box(&vec![-1.0; n], &vec![1.0; n], &mut stream_rng(seed, 0));
            let p = ProxParams { kind: ProxKind::Unif, h: 1e-2, n_cap: 100_000_000, k: 50_000, seed, stream: 1 };
            run_chain(&p, &x0, &cube, ChainOptions::new(0, 10)).unwrap().samples
        })
        .collect();
    let pooled: Vec<Vec<f64>> = chains.into_iter().flatten().collect();
    let m = empirical_moments(&pooled).unwrap();
    let mean = m.mean.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let sm = m.second_moment.iter().map(|v| (v - 1.0 / 3.0).abs()).fold(0.0, f64::max);
    let ks = (0..n)
        .map(|i| {
            let xs: Vec<f64> = pooled.iter().map(|s| s[i]).collect();
            ks_1d(&xs, |x| ((x + 1.0) / 2.0).clamp(0.0, 1.0))
        })
        .fold(0.0, f64::max);
    outcome(
        mean <= 0.02 && sm <= 0.02 && ks < 0.02,
        format!("{} samples: max|mean| {mean:.4}, max|E x² − 1/3| {sm:.4}, max KS {ks:.4}", pooled.len()),
    )
}

fn gauss_law() -> Outcome {
    let sigma2 = 1.0;
    let disk = Body::ball(vec![0.0, 0.0], 1.0).unwrap();
    // warm start: an exact draw of γ restricted to the disk, by rejection from
    // the uniform law on the disk (envelope: density ratio ≤ π at the origin)
    let mut rng = stream_rng(707, 0);
    let log_target = |x: &[f64]| {
        if x[0].hypot(x[1]) <= 1.0 {
            -(x[0] * x[0] + x[1] * x[1]) / (2.0 * sigma2)
        } else {
            f64::NEG_INFINITY
        }
    };
    let log_unif = -std::f64::consts::PI.ln();
    let init = reference_rejection_sampler(
        log_target,
        |r| uniform_ball(&[0.0, 0.0], 1.0, r),
        |_| log_unif,
        -log_unif,
        &mut rng,
        1,
        1_000_000,
    )
    .unwrap();
    let params = ProxParams { kind: ProxKind::Gauss { sigma2 }, h: 0.05, n_cap: 100_000_000, k: 100_000, seed: 707, stream: 1 };
    let report = run_chain(&params, &init.samples[0], &disk, ChainOptions::new(0, 1)).unwrap();

    let log_f = |r: f64| r.ln() - r * r / (2.0 * sigma2);
    let total = log_integrate(&log_f, 0.0, 1.0).unwrap().log_value;
    let cdf = |r: f64| {
        if r <= 0.0 {
            0.0
        } else {
            (log_integrate(&log_f, 0.0, r.min(1.0)).unwrap().log_value - total).exp()
        }
    };
    let radii: Vec<f64> = report.samples.iter().map(|s| s[0].hypot(s[1])).collect();
    let ks = ks_1d(&radii, cdf);
    outcome(radii.len() == 100_000 && ks < 0.02, format!("{} samples, radial sup deviation {ks:.4}", radii.len()))
}

fn pipeline_config(kind: PipelineKind, seed: u64, samples: usize) -> PipelineConfig {
    let mut c = PipelineConfig::new(PlanSettings::new(0.1, 0.1, kind.default_mode()), seed);
    c.final_samples = samples;
    c.thin = kind.default_thin();
    c.record_wall_time = false;
    c
}

fn accounting(r: &PipelineReport) -> bool {
    r.succeeded() && r.executed_phase_count == r.plan.predicted_phase_count && r.summed_queries() == r.total_queries
}

fn cold_start_uniform() -> Outcome {
    let cube = Body::cube(5, 1.0).unwrap();
    let r = sample_uniform_cold(&cube, &pipeline_config(PipelineKind::Uniform, 808, 20_000)).unwrap();
    if !r.succeeded() {
        return outcome(false, format!("aborted: {:?}", r.failure));
    }
    let m = empirical_moments(&r.samples).unwrap();
    let sm = m.second_moment.iter().map(|v| (v - 1.0 / 3.0).abs()).fold(0.0, f64::max);
    let mean = m.mean.iter().map(|v| v.abs()).fold(0.0, f64::max);
    outcome(
        r.samples.len() == 20_000 && sm <= 0.03 && mean <= 0.03 && accounting(&r),
        format!(
            "{} phases = plan {}, queries {} = Σ phases; max|E x² − 1/3| {sm:.4}, max|mean| {mean:.4}",
            r.executed_phase_count, r.plan.predicted_phase_count, r.total_queries.membership_queries
        ),
    )
}

fn cold_start_std_gaussian() -> Outcome {
    let cfg = pipeline_config(PipelineKind::StdGaussian, 909, 100_000);
    let half_line = Body::polytope(vec![vec![-1.0]], vec![0.0], vec![1.0], 1.0, None).unwrap();
    let r1 = sample_std_gaussian_cold(&half_line, &cfg).unwrap();
    let xs: Vec<f64> = r1.samples.iter().map(|s| s[0]).collect();
    let ks1 = ks_1d(&xs, |x| (2.0 * norm_cdf(x) - 1.0).max(0.0));

    let n = 5;
    let ball = Body::ball(vec![0.0; n], 1e3).unwrap();
    let r5 = sample_std_gaussian_cold(&ball, &cfg).unwrap();
    let ks5 = (0..n)
        .map(|i| {
            let xs: Vec<f64> = r5.samples.iter().map(|s| s[i]).collect();
            ks_1d(&xs, norm_cdf)
        })
        .fold(0.0, f64::max);
    outcome(
        accounting(&r1) && accounting(&r5) && xs.len() == 100_000 && ks1 < 0.02 && ks5 < 0.02,
        format!("half-line KS {ks1:.4}; n=5 ball max KS {ks5:.4}"),
    )
}

fn logconcave_pipeline() -> Outcome {
    let n = 5;
    let pot = Potential::quadratic(vec![0.0; n], 1.0).unwrap();
    let r = sample_logconcave_cold(&pot, &pipeline_config(PipelineKind::Logconcave, 1010, 20_000)).unwrap();
    if !r.succeeded() {
        return outcome(false, format!("aborted: {:?}", r.failure));
    }
    let m = empirical_moments(&r.samples).unwrap();
    let (vmin, vmax) = m.variance.iter().fold((f64::INFINITY, 0.0f64), |(a, b), v| (a.min(*v), b.max(*v)));
    let epi = r.epigraph_samples.as_ref().unwrap();
    let violations = epi.iter().filter(|z| pot.evaluate(&z[..n]).unwrap() > n as f64 * z[n]).count();

    // lift: n·(t − V(x)/n) ~ Exp(1)
    let mut rng = stream_rng(1010, 99);
    let resid: Vec<f64> = (0..100_000)
        .map(|_| {
            let x: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let z = lift_to_epigraph(&x, &pot, &mut rng).unwrap();
            n as f64 * z[n] - pot.evaluate(&x).unwrap()
        })
        .collect();
    let ks = ks_1d(&resid, |e| if e <= 0.0 { 0.0 } else { -(-e).exp_m1() });
    outcome(
        accounting(&r) && vmin >= 0.95 && vmax <= 1.05 && violations == 0 && ks < 0.01,
        format!("variance ∈ [{vmin:.4}, {vmax:.4}], {violations} epigraph violations, lift KS {ks:.4}"),
    )
}

fn covariance_weight() -> Outcome {
    let mut cfg = CovExperimentConfig::new(vec![0.01, 0.1, 1e3], 1111);
    cfg.samples_per_h = 20_000;
    let exp = cov_weight_experiment(&Body::cube(10, 1.0).unwrap(), &cfg).unwrap();
    let mut ok = exp.rows.iter().all(|r| !r.failed);
    let mut detail = Vec::new();
    for r in &exp.rows {
        if r.h <= 0.1 {
            // λ̂ ≤ h·(1 + 3·relative s.e.)
            ok &= r.lambda_hat <= r.h * (1.0 + 3.0 * r.stderr / r.lambda_hat);
        } else {
            ok &= (0.3..=0.4).contains(&r.lambda_hat);
        }
        detail.push(format!("h={}: {:.4}±{:.4}", r.h, r.lambda_hat, r.stderr));
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cov.csv");
    std::fs::write(&path, exp.to_csv()).unwrap();
    let csv = std::fs::read_to_string(&path).unwrap();
    ok &= csv.starts_with("h,lambda_hat,stderr,n_samples,seed\n") && csv.lines().count() == 4;
    outcome(ok, detail.join(", "))
}

fn determinism() -> Outcome {
    let cube = Body::cube(3, 1.0).unwrap();
    let cfg = pipeline_config(PipelineKind::Uniform, 1212, 500);
    let a = serde_json::to_string(&sample_uniform_cold(&cube, &cfg).unwrap()).unwrap();
    let b = serde_json::to_string(&sample_uniform_cold(&Body::cube(3, 1.0).unwrap(), &cfg).unwrap()).unwrap();

    let pot = Potential::quadratic(vec![0.5, -0.5], 1.0).unwrap();
    let lcfg = pipeline_config(PipelineKind::Logconcave, 1212, 200);
    let c = serde_json::to_string(&sample_logconcave_cold(&pot, &lcfg).unwrap()).unwrap();
    let d = serde_json::to_string(&sample_logconcave_cold(&pot.clone(), &lcfg).unwrap()).unwrap();

    let run = RunConfig::from_value(json!({
        "command": "sample-uniform", "seed": 1212, "timestamp": false, "final_samples": 2000,
        "target": {"kind": "axis_box", "n": 5, "params": {"half_width": 1.0}}
    }))
    .unwrap()
    .resolve();
    let e = serde_json::to_string_pretty(&execute(&run).unwrap().report).unwrap();
    let f = serde_json::to_string_pretty(&execute(&run).unwrap().report).unwrap();
    let other = RunConfig { seed: 1213, ..run };
    let g = serde_json::to_string_pretty(&execute(&other).unwrap().report).unwrap();
    outcome(
        a == b && c == d && e == f && e != g,
        format!("uniform {} B, logconcave {} B, CLI report {} B identical; other seed differs", a.len(), c.len(), e.len()),
    )
}
