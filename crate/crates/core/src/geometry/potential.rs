use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;

use super::{Body, QueryLedger};
use crate::error::{Error, Result};

pub type EvalFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A convex potential `V: R^n -> R ∪ {+∞}` behind a counted evaluation
/// oracle. `+∞` is represented by `f64::INFINITY`; NaN and `-∞` are rejected
/// when they come back from the user function.
#[derive(Clone)]
pub struct Potential {
    dim: usize,
    f: Arc<EvalFn>,
    x0: Vec<f64>,
    r_bound: f64,
    min_value: f64,
    ledger: Arc<QueryLedger>,
    label: String,
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Potential")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("x0", &self.x0)
            .field("r_bound", &self.r_bound)
            .field("min_value", &self.min_value)
            .finish()
    }
}

impl Potential {
    /// Wraps `f`. `r_bound` is the declared `R` with `E_π‖X − x0‖² ≤ R²`.
    pub fn new<F>(dim: usize, x0: Vec<f64>, r_bound: f64, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        if dim == 0 {
            return Err(Error::Construction("potential dimension must be positive".into()));
        }
        if x0.len() != dim {
            return Err(Error::Dimension { expected: dim, got: x0.len() });
        }
        if !(r_bound > 0.0 && r_bound.is_finite()) {
            return Err(Error::Construction(format!("R must be positive, got {r_bound}")));
        }
        if x0.iter().any(|v| !v.is_finite()) {
            return Err(Error::Construction("x0 must be finite".into()));
        }
        Ok(Self {
            dim,
            f: Arc::new(f),
            x0,
            r_bound,
            min_value: 0.0,
            ledger: Arc::new(QueryLedger::new()),
            label: "custom".into(),
        })
    }

    /// `V(x) = ‖x − c‖² / (2·variance)`, the standard Gaussian for `variance = 1`.
    pub fn quadratic(center: Vec<f64>, variance: f64) -> Result<Self> {
        if !(variance > 0.0) {
            return Err(Error::Construction("variance must be positive".into()));
        }
        let n = center.len();
        let c = center.clone();
        let mut pot = Self::new(n, center, (n as f64 * variance).sqrt(), move |x| {
            x.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / (2.0 * variance)
        })?;
        pot.label = "quadratic".into();
        Ok(pot)
    }

    /// `V(x) = Σ|x_i| / scale`, a product of Laplace densities.
    pub fn l1(n: usize, scale: f64) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(Error::Construction("scale must be positive".into()));
        }
        let mut pot = Self::new(n, vec![0.0; n], (2.0 * n as f64).sqrt() * scale, move |x| {
            x.iter().map(|v| v.abs()).sum::<f64>() / scale
        })?;
        pot.label = "l1".into();
        Ok(pot)
    }

    /// 0 on `body`, `+∞` off it. Evaluations use the body's raw predicate and
    /// are counted on this potential's ledger only.
    pub fn indicator(body: &Body) -> Result<Self> {
        let r = body
            .r_bound()
            .ok_or_else(|| Error::Construction("indicator potential needs a body with declared R".into()))?;
        let b = body.clone();
        let mut pot = Self::new(body.dim(), body.center().to_vec(), r, move |x| {
            match b.contains_uncounted(x) {
                Ok(true) => 0.0,
                _ => f64::INFINITY,
            }
        })?;
        pot.label = "indicator".into();
        Ok(pot)
    }

    /// Declares `min V` (used to normalize the epigraph). Defaults to 0.
    pub fn with_min_value(mut self, min_value: f64) -> Self {
        self.min_value = min_value;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn x0(&self) -> &[f64] {
        &self.x0
    }

    pub fn r_bound(&self) -> f64 {
        self.r_bound
    }

    pub fn min_value(&self) -> f64 {
        self.min_value
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn ledger(&self) -> &Arc<QueryLedger> {
        &self.ledger
    }

    /// Counted evaluation of `V(x)`.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::Dimension { expected: self.dim, got: x.len() });
        }
        self.ledger.record_evaluation();
        let v = (self.f)(x);
        if v.is_nan() {
            return Err(Error::Data(format!("potential returned NaN at {x:?}")));
        }
        if v == f64::NEG_INFINITY {
            return Err(Error::Data(format!("potential returned -inf at {x:?}")));
        }
        Ok(v)
    }

    /// `x ↦ V(x + x0) − min V`: same ledger, centered at the origin with
    /// minimum value 0.
    pub fn recentered(&self) -> Potential {
        let inner = Arc::clone(&self.f);
        let shift = self.x0.clone();
        let min = self.min_value;
        let dim = self.dim;
        Potential {
            dim,
            f: Arc::new(move |x: &[f64]| {
                let moved: Vec<f64> = x.iter().zip(&shift).map(|(a, s)| a + s).collect();
                inner(&moved) - min
            }),
            x0: vec![0.0; dim],
            r_bound: self.r_bound,
            min_value: 0.0,
            ledger: Arc::clone(&self.ledger),
            label: format!("{} (recentered)", self.label),
        }
    }

    /// Checks midpoint convexity along `trials` random segments around x0 of
    /// length scale `spread`. Uses uncounted evaluations.
    pub fn spot_check_convexity<R: Rng + ?Sized>(&self, rng: &mut R, trials: usize, spread: f64) -> Result<()> {
        for _ in 0..trials {
            let a: Vec<f64> = self.x0.iter().map(|c| c + spread * rng.sample::<f64, _>(StandardNormal)).collect();
            let b: Vec<f64> = self.x0.iter().map(|c| c + spread * rng.sample::<f64, _>(StandardNormal)).collect();
            let lam: f64 = rng.random();
            let mid: Vec<f64> = a.iter().zip(&b).map(|(u, v)| lam * u + (1.0 - lam) * v).collect();
            let (fa, fb, fm) = ((self.f)(&a), (self.f)(&b), (self.f)(&mid));
            if fa.is_infinite() || fb.is_infinite() {
                continue;
            }
            let rhs = lam * fa + (1.0 - lam) * fb;
            if fm > rhs + 1e-9 * (1.0 + rhs.abs()) {
                return Err(Error::Data(format!(
                    "convexity violated: V(mid) = {fm} > {rhs} on a sampled segment"
                )));
            }
        }
        Ok(())
    }

    /// Checks that random points of `B_1(x0)` lie in the ground set
    /// `{V − min V ≤ 10n}`. Uses uncounted evaluations.
    pub fn spot_check_ground_set<R: Rng + ?Sized>(&self, rng: &mut R, probes: usize) -> Result<()> {
        let limit = 10.0 * self.dim as f64;
        for _ in 0..probes {
            let u = random_unit(rng, self.dim);
            let x: Vec<f64> = self.x0.iter().zip(&u).map(|(c, d)| c + d).collect();
            let v = (self.f)(&x) - self.min_value;
            if !(v <= limit) {
                return Err(Error::Data(format!("ground set does not contain B_1(x0): V − min = {v} at {x:?}")));
            }
        }
        Ok(())
    }
}

pub(crate) fn random_unit<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let z: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return z.into_iter().map(|v| v / norm).collect();
        }
    }
}
