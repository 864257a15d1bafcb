use rand::Rng;
use serde::{Deserialize, Serialize};

use super::quadrature::{renyi_q_1d, Density1D};
use crate::error::{usage, Result};
use crate::rng::stream_rng;
use crate::schedule::{global_annealing_bound, variance_annealing_bound};

/// Slack allowed between quadrature values and closed-form bounds.
pub const BOUND_SLACK: f64 = 1e-6;

/// Convex 1-D potentials with integrable `e^{−V}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Potential1D {
    /// `max_i (a_i·x + b_i)`; needs one negative and one positive slope.
    PiecewiseLinear { pieces: Vec<(f64, f64)> },
    /// `curvature·(x − center)²/2`.
    Quadratic { curvature: f64, center: f64 },
}

impl Potential1D {
    pub fn laplace() -> Self {
        Potential1D::PiecewiseLinear { pieces: vec![(-1.0, 0.0), (1.0, 0.0)] }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Potential1D::PiecewiseLinear { pieces } => {
                pieces.iter().map(|(a, b)| a * x + b).fold(f64::NEG_INFINITY, f64::max)
            }
            Potential1D::Quadratic { curvature, center } => curvature * (x - center).powi(2) / 2.0,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Potential1D::PiecewiseLinear { pieces } => {
                let neg = pieces.iter().any(|p| p.0 < 0.0);
                let pos = pieces.iter().any(|p| p.0 > 0.0);
                if !(neg && pos) || pieces.iter().any(|p| !(p.0.is_finite() && p.1.is_finite())) {
                    return Err(usage("piecewise-linear potential needs finite pieces with slopes of both signs"));
                }
            }
            Potential1D::Quadratic { curvature, center } => {
                if !(*curvature > 0.0 && curvature.is_finite() && center.is_finite()) {
                    return Err(usage("quadratic potential needs a positive curvature"));
                }
            }
        }
        Ok(())
    }

    /// An interval outside of which `e^{−β(V − min V)} < e^{−800}`.
    fn window(&self, beta: f64) -> (f64, f64) {
        let gap = 800.0 / beta;
        match self {
            Potential1D::PiecewiseLinear { pieces } => {
                let vmin = self.eval(self.argmin());
                let (al, bl) = pieces.iter().copied().fold((0.0, 0.0), |acc, p| if p.0 < acc.0 { p } else { acc });
                let (ar, br) = pieces.iter().copied().fold((0.0, 0.0), |acc, p| if p.0 > acc.0 { p } else { acc });
                ((gap + vmin - bl) / al, (gap + vmin - br) / ar)
            }
            Potential1D::Quadratic { curvature, center } => {
                let w = (2.0 * gap / curvature).sqrt();
                (center - w, center + w)
            }
        }
    }

    fn argmin(&self) -> f64 {
        match self {
            Potential1D::Quadratic { center, .. } => *center,
            Potential1D::PiecewiseLinear { pieces } => {
                // the minimum sits at a crossing of two lines of opposite slope
                let mut best = (f64::INFINITY, 0.0);
                for (i, p) in pieces.iter().enumerate() {
                    for r in &pieces[i + 1..] {
                        if p.0 != r.0 {
                            let x = (r.1 - p.1) / (p.0 - r.0);
                            let v = self.eval(x);
                            if v < best.0 {
                                best = (v, x);
                            }
                        }
                    }
                }
                best.1
            }
        }
    }

    /// Normalized `e^{−βV}` on a window that carries all of its mass.
    pub fn tempered(&self, beta: f64) -> Result<Density1D> {
        self.validate()?;
        if !(beta > 0.0) {
            return Err(usage(format!("inverse temperature must be positive, got {beta}")));
        }
        let (a, b) = self.window(beta);
        let v = self.clone();
        let shift = v.eval(v.argmin());
        Density1D::new(a, b, move |x| -beta * (v.eval(x) - shift))
    }

    /// A random member of either family, with slopes and curvatures in
    /// `[0.2, 5]`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        if rng.random_bool(0.5) {
            let k = rng.random_range(2..=4);
            let mut pieces: Vec<(f64, f64)> =
                (0..k).map(|_| (rng.random_range(-5.0..5.0), rng.random_range(-1.0..1.0))).collect();
            pieces[0].0 = -rng.random_range(0.2..5.0);
            pieces[1].0 = rng.random_range(0.2..5.0);
            Potential1D::PiecewiseLinear { pieces }
        } else {
            Potential1D::Quadratic { curvature: rng.random_range(0.2..5.0), center: rng.random_range(-2.0..2.0) }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "lemma", rename_all = "snake_case")]
pub enum AnnealingCase {
    /// `R_q(e^{−(1+α)V} ‖ e^{−V})` in dimension 1.
    Global { potential: Potential1D, q: f64, alpha: f64, delta: f64 },
    /// `R_q(γ_{σ²}|[lo,hi] ‖ γ_{σ²(1+α)}|[lo,hi])` with support radius `radius`.
    Variance { lo: f64, hi: f64, radius: f64, sigma2: f64, q: f64, alpha: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnealingCheckRow {
    pub case: AnnealingCase,
    pub quadrature: f64,
    pub quadrature_error: f64,
    pub bound: f64,
    pub holds: bool,
}

impl AnnealingCase {
    pub fn check(&self) -> Result<AnnealingCheckRow> {
        let (est, bound) = match self {
            AnnealingCase::Global { potential, q, alpha, delta } => {
                let mu = potential.tempered(1.0 + alpha)?;
                let nu = potential.tempered(1.0)?;
                // ν's window must cover μ's support; widen to the union
                let (a, b) = (mu.a.min(nu.a), mu.b.max(nu.b));
                let p = potential.clone();
                let shift = p.eval(p.argmin());
                let beta = 1.0 + alpha;
                let mu = Density1D::new(a, b, move |x| -beta * (p.eval(x) - shift))?;
                let p = potential.clone();
                let nu = Density1D::new(a, b, move |x| -(p.eval(x) - shift))?;
                (renyi_q_1d(&mu, &nu, *q)?, global_annealing_bound(*q, 1, *alpha, *delta)?)
            }
            AnnealingCase::Variance { lo, hi, radius, sigma2, q, alpha } => {
                if !(lo < hi) || lo.abs().max(hi.abs()) > *radius {
                    return Err(usage("variance case needs lo < hi inside the support radius"));
                }
                let (s1, s2) = (*sigma2, sigma2 * (1.0 + alpha));
                let mu = Density1D::new(*lo, *hi, move |x| -x * x / (2.0 * s1))?;
                let nu = Density1D::new(*lo, *hi, move |x| -x * x / (2.0 * s2))?;
                (renyi_q_1d(&mu, &nu, *q)?, variance_annealing_bound(*q, *radius, sigma2.sqrt(), *alpha)?)
            }
        };
        Ok(AnnealingCheckRow {
            case: self.clone(),
            quadrature: est.value,
            quadrature_error: est.error_bound,
            bound,
            holds: est.value <= bound + BOUND_SLACK,
        })
    }
}

/// Admissible annealing steps for order `q` in dimension 1: a fixed positive
/// grid, `(q)^{−1/2}`, and two negative steps at the edge `α = −δ/2`.
pub fn global_alpha_grid(q: f64) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = [0.05, 0.2, q.powf(-0.5)].iter().map(|a| (*a, 0.0)).collect();
    for delta in [0.5 / q, 0.9 / q] {
        out.push((-delta / 2.0, delta));
    }
    out
}

/// `n_potentials` seeded random potentials (plus the Laplace potential) ×
/// `q ∈ {2, 3, 5}` × [`global_alpha_grid`], then `Unif[−1, 1]` with
/// `R = 2`, `σ² ∈ {0.25, 1}`, `α ∈ {0.05, 0.1}`, `q ∈ {2, 4}`.
pub fn default_annealing_cases(seed: u64, n_potentials: usize) -> Vec<AnnealingCase> {
    let mut rng = stream_rng(seed, 0);
    let mut pots = vec![Potential1D::laplace()];
    pots.extend((0..n_potentials).map(|_| Potential1D::random(&mut rng)));
    let mut cases = Vec::new();
    for pot in &pots {
        for q in [2.0, 3.0, 5.0] {
            for (alpha, delta) in global_alpha_grid(q) {
                cases.push(AnnealingCase::Global { potential: pot.clone(), q, alpha, delta });
            }
        }
    }
    for sigma2 in [0.25, 1.0] {
        for alpha in [0.05, 0.1] {
            for q in [2.0, 4.0] {
                cases.push(AnnealingCase::Variance { lo: -1.0, hi: 1.0, radius: 2.0, sigma2, q, alpha });
            }
        }
    }
    cases
}
