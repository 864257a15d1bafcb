//! How the covariance of `π·γ_h` grows with `h` on the cube `[-1, 1]^6`:
//! about `h` for small `h`, saturating at `‖cov π‖ = 1/3`.
//!
//!     cargo run --release --example covariance_weight

use lcsamp::diagnostics::{cov_weight_experiment, CovExperimentConfig};
use lcsamp::geometry::Body;

fn main() -> lcsamp::Result<()> {
    let mut cfg = CovExperimentConfig::new(vec![0.01, 0.03, 0.1, 0.3, 1.0, 10.0, 1000.0], 11);
    cfg.samples_per_h = 10_000;
    let exp = cov_weight_experiment(&Body::cube(6, 1.0)?, &cfg)?;
    println!("{:>8} {:>10} {:>9}  envelope", "h", "lambda", "stderr");
    for r in &exp.rows {
        println!("{:>8} {:>10.4} {:>9.4}  {}", r.h, r.lambda_hat, r.stderr, r.within_envelope);
    }
    print!("{}", exp.to_csv());
    Ok(())
}
