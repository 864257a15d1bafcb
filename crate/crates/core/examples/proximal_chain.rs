//! One `PS_unif` chain on the cube `[-1, 1]^10`, started from an exact
//! uniform draw, compared against the cube's moments (mean 0, E x² = 1/3).
//!
//!     cargo run --release --example proximal_chain

use lcsamp::diagnostics::{empirical_moments, ks_1d, uniform_box};
use lcsamp::geometry::Body;
use lcsamp::proximal::{run_chain, ChainOptions, ProxKind, ProxParams};
use lcsamp::rng::stream_rng;

fn main() -> lcsamp::Result<()> {
    let n = 10;
    let cube = Body::cube(n, 1.0)?;
    let x0 = uniform_box(&vec![-1.0; n], &vec![1.0; n], &mut stream_rng(1, 0));

    let params = ProxParams { kind: ProxKind::Unif, h: 1e-2, n_cap: 1_000_000, k: 50_000, seed: 1, stream: 1 };
    let report = run_chain(&params, &x0, &cube, ChainOptions::new(0, 10))?;
    let m = empirical_moments(&report.samples)?;

    println!("kept {} samples, failures {}", report.samples.len(), report.failures);
    println!(
        "queries: {} membership, {} trials ({:.3} per round)",
        report.queries.membership_queries,
        report.queries.rejection_trials,
        report.queries.rejection_trials as f64 / report.total_iterations as f64
    );
    for i in 0..3 {
        let xs: Vec<f64> = report.samples.iter().map(|s| s[i]).collect();
        let ks = ks_1d(&xs, |x| ((x + 1.0) / 2.0).clamp(0.0, 1.0));
        println!("x{i}: mean {:+.4}  E x² {:.4}  KS {:.4}", m.mean[i], m.second_moment[i], ks);
    }
    Ok(())
}
