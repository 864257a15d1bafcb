//! The standard Gaussian restricted to the half-line `[0, ∞)`, sampled from
//! a cold start by annealing the variance from `1/n` up to 1.
//!
//!     cargo run --release --example truncated_gaussian

use lcsamp::diagnostics::ks_1d;
use lcsamp::geometry::Body;
use lcsamp::pipelines::{sample_std_gaussian_cold, PipelineConfig};
use lcsamp::schedule::{PipelineKind, PlanSettings};
use lcsamp::special::norm_cdf;

fn main() -> lcsamp::Result<()> {
    let kind = PipelineKind::StdGaussian;
    let mut cfg = PipelineConfig::new(PlanSettings::new(0.1, 0.1, kind.default_mode()), 9);
    cfg.final_samples = 20_000;
    cfg.thin = kind.default_thin();

    // {x : −x ≤ 0}, with an inner unit ball around x = 1
    let half_line = Body::polytope(vec![vec![-1.0]], vec![0.0], vec![1.0], 1.0, None)?;
    let r = sample_std_gaussian_cold(&half_line, &cfg)?;
    let xs: Vec<f64> = r.samples.iter().map(|s| s[0]).collect();
    let ks = ks_1d(&xs, |x| (2.0 * norm_cdf(x) - 1.0).max(0.0));
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    println!("{} steps, KS vs half-normal {ks:.4}, mean {mean:.4} (exact {:.4})", r.phases.len(), (2.0 / std::f64::consts::PI).sqrt());
    Ok(())
}
