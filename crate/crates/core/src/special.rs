//! Standard normal CDF helpers, with log-domain variants for the tails.

use std::f64::consts::{PI, SQRT_2};

/// Φ(x).
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// log Φ(x), accurate far into the lower tail.
pub fn log_norm_cdf(x: f64) -> f64 {
    if x > -37.0 {
        return (0.5 * libm::erfc(-x / SQRT_2)).ln();
    }
    // asymptotic expansion of the Mills ratio; truncation error < 1e-13 here
    let z2 = 1.0 / (x * x);
    let series = 1.0 - z2 + 3.0 * z2 * z2 - 15.0 * z2.powi(3) + 105.0 * z2.powi(4);
    -0.5 * x * x - (-x).ln() - 0.5 * (2.0 * PI).ln() + series.ln()
}

/// log(Φ(b) − Φ(a)) for a < b without cancellation in either tail.
pub fn log_norm_interval(a: f64, b: f64) -> f64 {
    if a >= b {
        return f64::NEG_INFINITY;
    }
    if a > 0.0 {
        // Φ(b) − Φ(a) = Φ(−a) − Φ(−b)
        return log_diff_exp(log_norm_cdf(-a), log_norm_cdf(-b));
    }
    if b < 0.0 {
        return log_diff_exp(log_norm_cdf(b), log_norm_cdf(a));
    }
    // a ≤ 0 ≤ b: the mass is at least the larger half-interval mass
    (-(norm_cdf(a) + norm_cdf(-b))).ln_1p()
}

/// log(e^hi − e^lo) for hi ≥ lo.
fn log_diff_exp(hi: f64, lo: f64) -> f64 {
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (-(lo - hi).exp()).ln_1p()
}
