//! Sampling `e^{−V}` through the epigraph `{(x, t) : V(x) ≤ n·t}`: tilted
//! Gaussian cooling with `PS_ann`, then `PS_exp`, then the `x`-marginal.
//!
//!     cargo run --release --example logconcave_epigraph

use lcsamp::diagnostics::empirical_moments;
use lcsamp::geometry::Potential;
use lcsamp::pipelines::{sample_logconcave_cold, PipelineConfig};
use lcsamp::schedule::{PipelineKind, PlanSettings};

fn main() -> lcsamp::Result<()> {
    let kind = PipelineKind::Logconcave;
    let mut cfg = PipelineConfig::new(PlanSettings::new(0.1, 0.1, kind.default_mode()), 5);
    cfg.final_samples = 5_000;
    cfg.thin = kind.default_thin();

    let n = 3;
    for (name, pot, var) in [
        ("gaussian", Potential::quadratic(vec![1.0, -2.0, 0.5], 1.0)?, 1.0),
        ("laplace", Potential::l1(n, 1.0)?, 2.0),
    ] {
        let r = sample_logconcave_cold(&pot, &cfg)?;
        if let Some(f) = &r.failure {
            println!("{name}: aborted at step {} ({:?})", f.step_index, f.phase);
            continue;
        }
        let m = empirical_moments(&r.samples)?;
        let below = r.epigraph_samples.as_ref().map_or(0, |e| {
            e.iter().filter(|z| pot.evaluate(&z[..n]).unwrap() - pot.min_value() > n as f64 * z[n]).count()
        });
        println!(
            "{name}: {} steps, {} evaluations; mean {:.3?}, variance {:.3?} (exact {var}); epigraph violations {below}",
            r.phases.len(),
            r.total_queries.evaluation_queries,
            m.mean,
            m.variance
        );
    }
    Ok(())
}
