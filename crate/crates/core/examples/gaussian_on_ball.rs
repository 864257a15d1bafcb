//! `PS_gauss` for `γ_{σ²}` restricted to the unit disk, checked against the
//! radial CDF computed by quadrature.
//!
//!     cargo run --release --example gaussian_on_ball

use lcsamp::diagnostics::{ks_1d, log_integrate};
use lcsamp::geometry::Body;
use lcsamp::proximal::{run_chain, ChainOptions, ProxKind, ProxParams};

fn main() -> lcsamp::Result<()> {
    let sigma2 = 1.0;
    let disk = Body::ball(vec![0.0, 0.0], 1.0)?;
    let params =
        ProxParams { kind: ProxKind::Gauss { sigma2 }, h: 0.05, n_cap: 1_000_000, k: 120_000, seed: 3, stream: 0 };
    let report = run_chain(&params, &[0.0, 0.0], &disk, ChainOptions::new(2_000, 1))?;

    // radius density ∝ r·exp(−r²/2σ²) on [0, 1]
    let log_f = |r: f64| r.ln() - r * r / (2.0 * sigma2);
    let total = log_integrate(&log_f, 0.0, 1.0)?.log_value;
    let cdf = |r: f64| {
        if r <= 0.0 {
            0.0
        } else {
            log_integrate(&log_f, 0.0, r.min(1.0)).map(|li| (li.log_value - total).exp()).unwrap_or(1.0)
        }
    };
    let radii: Vec<f64> = report.samples.iter().map(|s| s[0].hypot(s[1])).collect();
    println!("{} samples, radial KS vs quadrature: {:.4}", radii.len(), ks_1d(&radii, cdf));
    Ok(())
}
