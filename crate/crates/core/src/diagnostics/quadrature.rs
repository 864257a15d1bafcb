use std::cell::Cell;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};

const PANELS: usize = 64;
const TOL: f64 = 1e-9;
const MAX_DEPTH: u32 = 48;
/// `ln(1e-300)`: shifted integrand values below this are treated as 0.
const LOG_CLIP: f64 = -690.775_527_898_213_7;

/// `ln ∫_a^b exp(g(x)) dx` and an absolute error estimate on the
/// *un-logged* integral relative to its value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogIntegral {
    pub log_value: f64,
    /// Estimated relative error of `exp(log_value)`.
    pub rel_error: f64,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adapt(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> (f64, f64) {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    // below ~32 ulp of the panel value the Richardson delta is rounding noise
    let floor = 32.0 * f64::EPSILON * (left.abs() + right.abs());
    if depth == 0 || delta.abs() <= 15.0 * tol || delta.abs() <= floor || m <= a || m >= b {
        return (left + right + delta / 15.0, delta.abs() / 15.0);
    }
    let (l, el) = adapt(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1);
    let (r, er) = adapt(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
    (l + r, el + er)
}

/// Adaptive Simpson on `exp(g)` in log-sum-exp form: `g` is shifted by its
/// maximum over a 64-panel grid before exponentiating, and panels are
/// refined by halving until the Richardson delta drops below `1e-9`.
pub fn log_integrate(g: &dyn Fn(f64) -> f64, a: f64, b: f64) -> Result<LogIntegral> {
    if !(a < b && a.is_finite() && b.is_finite()) {
        return Err(usage(format!("integration interval [{a}, {b}] is invalid")));
    }
    let nodes = 2 * PANELS + 1;
    let xs: Vec<f64> = (0..nodes).map(|i| a + (b - a) * i as f64 / (nodes - 1) as f64).collect();
    let gs: Vec<f64> = xs.iter().map(|&x| g(x)).collect();
    if gs.iter().any(|v| v.is_nan()) {
        return Err(Error::Data("log-integrand returned NaN".into()));
    }
    let shift = gs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if shift == f64::NEG_INFINITY {
        return Ok(LogIntegral { log_value: f64::NEG_INFINITY, rel_error: 0.0 });
    }
    let f = |x: f64| {
        let v = g(x) - shift;
        if v < LOG_CLIP {
            0.0
        } else {
            v.exp()
        }
    };
    let fv: Vec<f64> = gs.iter().map(|v| if v - shift < LOG_CLIP { 0.0 } else { (v - shift).exp() }).collect();
    let (mut total, mut err) = (0.0, 0.0);
    for p in 0..PANELS {
        let (i0, i1, i2) = (2 * p, 2 * p + 1, 2 * p + 2);
        let whole = simpson(xs[i0], xs[i2], fv[i0], fv[i1], fv[i2]);
        let (v, e) = adapt(&f, xs[i0], xs[i2], fv[i0], fv[i1], fv[i2], whole, TOL / PANELS as f64, MAX_DEPTH);
        total += v;
        err += e;
    }
    if !(total > 0.0) {
        return Ok(LogIntegral { log_value: f64::NEG_INFINITY, rel_error: 0.0 });
    }
    Ok(LogIntegral { log_value: shift + total.ln(), rel_error: err / total })
}

/// A normalized density on `[a, b]` given by an unnormalized log-density.
#[derive(Clone)]
pub struct Density1D {
    pub a: f64,
    pub b: f64,
    log_f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    log_norm: f64,
}

impl fmt::Debug for Density1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Density1D").field("a", &self.a).field("b", &self.b).field("log_norm", &self.log_norm).finish()
    }
}

impl Density1D {
    /// `log_f` may return `-∞` (zero density) but not NaN.
    pub fn new<F>(a: f64, b: f64, log_f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let li = log_integrate(&log_f, a, b)?;
        if !li.log_value.is_finite() {
            return Err(Error::Data("density has zero or infinite mass".into()));
        }
        let d = Self { a, b, log_f: Arc::new(log_f), log_norm: li.log_value };
        let check = log_integrate(&|x| d.log_pdf(x), a, b)?.log_value.exp();
        if (check - 1.0).abs() > 1e-6 {
            return Err(Error::Internal(format!("normalized mass {check} is not within 1e-6 of 1")));
        }
        Ok(d)
    }

    /// Log of the normalized density; `-∞` outside `[a, b]`.
    pub fn log_pdf(&self, x: f64) -> f64 {
        if x < self.a || x > self.b {
            f64::NEG_INFINITY
        } else {
            (self.log_f)(x) - self.log_norm
        }
    }

    pub fn log_normalizer(&self) -> f64 {
        self.log_norm
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DivergenceMethod {
    Quadrature,
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergenceEstimate {
    pub q: f64,
    pub value: f64,
    pub method: DivergenceMethod,
    pub error_bound: f64,
}

/// `R_q(p‖r) = (1/(q−1))·ln ∫ p^q r^{1−q}` by quadrature over the support
/// of `p`. Fails with a domain error where `r` vanishes but `p` does not.
pub fn renyi_q_1d(p: &Density1D, r: &Density1D, q: f64) -> Result<DivergenceEstimate> {
    if !(q > 1.0 && q.is_finite()) {
        return Err(usage(format!("Rényi order must be a finite q > 1, got {q}")));
    }
    let violation = Cell::new(None);
    let g = |x: f64| {
        let lp = p.log_pdf(x);
        if lp < LOG_CLIP {
            return f64::NEG_INFINITY;
        }
        let lr = r.log_pdf(x);
        if lr == f64::NEG_INFINITY {
            violation.set(Some(x));
            return f64::NEG_INFINITY;
        }
        q * lp + (1.0 - q) * lr
    };
    let li = log_integrate(&g, p.a, p.b)?;
    if let Some(x) = violation.get() {
        return Err(Error::Domain(format!("reference density vanishes at {x} where p > 1e-300")));
    }
    // ln(I(1 ± e)) ≈ ln I ± e; Rényi values are non-negative, so rounding
    // noise below zero is clipped.
    let value = (li.log_value / (q - 1.0)).max(0.0);
    Ok(DivergenceEstimate { q, value, method: DivergenceMethod::Quadrature, error_bound: li.rel_error / (q - 1.0) })
}
