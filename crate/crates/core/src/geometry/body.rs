use std::fmt;
use std::sync::Arc;

use rand::Rng;

use super::potential::random_unit;
use super::{Potential, QueryLedger};
use crate::error::{Error, Result};

pub type MembershipFn = dyn Fn(&[f64]) -> Result<bool> + Send + Sync;

/// A convex body behind a counted membership oracle.
///
/// Metadata (`center`, `inner_radius`, `R`, `D`) is declared by whoever
/// builds the body and is only spot-checked, never certified. Bodies derived
/// from another body (translations, truncations, intersections) share the
/// parent's [`QueryLedger`], and each [`Body::contains`] call on any of them
/// counts exactly one membership query.
#[derive(Clone)]
pub struct Body {
    dim: usize,
    center: Vec<f64>,
    inner_radius: f64,
    r_bound: Option<f64>,
    diameter: Option<f64>,
    t_range: Option<(f64, f64)>,
    box_bounds: Option<(Vec<f64>, Vec<f64>)>,
    label: String,
    pred: Arc<MembershipFn>,
    ledger: Arc<QueryLedger>,
}

impl fmt::Debug for Body {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Body")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("center", &self.center)
            .field("inner_radius", &self.inner_radius)
            .field("r_bound", &self.r_bound)
            .field("diameter", &self.diameter)
            .field("t_range", &self.t_range)
            .finish()
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn check_finite(what: &str, v: &[f64]) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::Construction(format!("{what} must be finite")))
    }
}

impl Body {
    /// Body from an arbitrary convex membership predicate. The center must
    /// be a member; everything else is trusted.
    pub fn from_predicate<F>(
        dim: usize,
        center: Vec<f64>,
        inner_radius: f64,
        r_bound: Option<f64>,
        diameter: Option<f64>,
        pred: F,
    ) -> Result<Self>
    where
        F: Fn(&[f64]) -> Result<bool> + Send + Sync + 'static,
    {
        let body = Self::raw(dim, center, inner_radius, r_bound, diameter, "custom", Arc::new(pred))?;
        if !(body.pred)(&body.center)? {
            return Err(Error::Construction("declared center is not a member".into()));
        }
        Ok(body)
    }

    fn raw(
        dim: usize,
        center: Vec<f64>,
        inner_radius: f64,
        r_bound: Option<f64>,
        diameter: Option<f64>,
        label: &str,
        pred: Arc<MembershipFn>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Construction("dimension must be positive".into()));
        }
        if center.len() != dim {
            return Err(Error::Dimension { expected: dim, got: center.len() });
        }
        check_finite("center", &center)?;
        if !(inner_radius > 0.0 && inner_radius.is_finite()) {
            return Err(Error::Construction(format!("inner radius must be positive, got {inner_radius}")));
        }
        if let Some(r) = r_bound {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::Construction(format!("R must be positive, got {r}")));
            }
        }
        if let Some(d) = diameter {
            if !(d.is_finite() && d >= inner_radius) {
                return Err(Error::Construction(format!("diameter {d} is below the inner radius {inner_radius}")));
            }
        }
        Ok(Self {
            dim,
            center,
            inner_radius,
            r_bound,
            diameter,
            t_range: None,
            box_bounds: None,
            label: label.into(),
            pred,
            ledger: Arc::new(QueryLedger::new()),
        })
    }

    /// Always-true surrogate for `R^n`. Useful in tests of the backward step.
    pub fn whole_space(dim: usize) -> Result<Self> {
        Self::raw(dim, vec![0.0; dim], 1.0, None, None, "whole_space", Arc::new(|_: &[f64]| Ok(true)))
    }

    /// Closed Euclidean ball `B_radius(center)`.
    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Construction(format!("ball radius must be positive, got {radius}")));
        }
        let n = center.len() as f64;
        let c = center.clone();
        let r2 = radius * radius;
        let pred = move |x: &[f64]| Ok(x.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() <= r2);
        Self::raw(
            center.len(),
            center,
            radius,
            Some(radius * (n / (n + 2.0)).sqrt()),
            Some(2.0 * radius),
            "ball",
            Arc::new(pred),
        )
    }

    /// Axis-aligned box `Π [lo_i, hi_i]`, centered at its midpoint.
    pub fn axis_box(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::Dimension { expected: lo.len(), got: hi.len() });
        }
        check_finite("box bounds", &lo)?;
        check_finite("box bounds", &hi)?;
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b)) {
            return Err(Error::Construction("box needs lo < hi in every coordinate".into()));
        }
        let center: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
        let half: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (b - a)).collect();
        let r = half.iter().cloned().fold(f64::INFINITY, f64::min);
        let r_bound = (half.iter().map(|w| w * w).sum::<f64>() / 3.0).sqrt();
        let diameter = dist(&lo, &hi);
        let (l, h) = (lo.clone(), hi.clone());
        let pred = move |x: &[f64]| Ok(x.iter().zip(l.iter().zip(&h)).all(|(v, (a, b))| *a <= *v && *v <= *b));
        let mut body = Self::raw(lo.len(), center, r, Some(r_bound), Some(diameter), "axis_box", Arc::new(pred))?;
        body.box_bounds = Some((lo, hi));
        Ok(body)
    }

    /// The cube `[−half_width, half_width]^n`.
    pub fn cube(n: usize, half_width: f64) -> Result<Self> {
        Self::axis_box(vec![-half_width; n], vec![half_width; n])
    }

    /// `{x : A x ≤ b}` with rows of `A` given separately. The inner radius is
    /// the smallest facet distance from `center`; `R` must be declared since
    /// it cannot be read off the inequalities cheaply.
    pub fn polytope(
        a: Vec<Vec<f64>>,
        b: Vec<f64>,
        center: Vec<f64>,
        r_bound: f64,
        diameter: Option<f64>,
    ) -> Result<Self> {
        let n = center.len();
        if a.len() != b.len() {
            return Err(Error::Construction(format!("A has {} rows but b has {} entries", a.len(), b.len())));
        }
        if a.is_empty() {
            return Err(Error::Construction("polytope needs at least one inequality".into()));
        }
        let mut r = f64::INFINITY;
        for (row, bi) in a.iter().zip(&b) {
            if row.len() != n {
                return Err(Error::Dimension { expected: n, got: row.len() });
            }
            check_finite("A", row)?;
            let rn = norm(row);
            if rn == 0.0 {
                return Err(Error::Construction("zero row in A".into()));
            }
            let slack = bi - row.iter().zip(&center).map(|(u, v)| u * v).sum::<f64>();
            r = r.min(slack / rn);
        }
        if !(r > 0.0) {
            return Err(Error::Construction("center is not strictly inside the polytope".into()));
        }
        let pred = move |x: &[f64]| {
            Ok(a.iter().zip(&b).all(|(row, bi)| row.iter().zip(x).map(|(u, v)| u * v).sum::<f64>() <= *bi))
        };
        Self::raw(n, center, r, Some(r_bound), diameter, "polytope", Arc::new(pred))
    }

    /// Standard simplex `{x ≥ 0, Σx ≤ 1}` around `center` (barycenter by
    /// default). `R` is exact for the uniform law.
    pub fn simplex(n: usize, center: Option<Vec<f64>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Construction("dimension must be positive".into()));
        }
        let nf = n as f64;
        let center = center.unwrap_or_else(|| vec![1.0 / (nf + 1.0); n]);
        if center.len() != n {
            return Err(Error::Dimension { expected: n, got: center.len() });
        }
        let sum: f64 = center.iter().sum();
        let r = center.iter().cloned().fold((1.0 - sum) / nf.sqrt(), f64::min);
        if !(r > 0.0) {
            return Err(Error::Construction("simplex center must be interior".into()));
        }
        // E X_i = 1/(n+1), E X_i² = 2/((n+1)(n+2)) for the uniform simplex.
        let second = nf * 2.0 / ((nf + 1.0) * (nf + 2.0)) - 2.0 * sum / (nf + 1.0)
            + center.iter().map(|v| v * v).sum::<f64>();
        let pred = |x: &[f64]| Ok(x.iter().all(|v| *v >= 0.0) && x.iter().sum::<f64>() <= 1.0);
        Self::raw(n, center, r, Some(second.sqrt()), Some(2f64.sqrt()), "simplex", Arc::new(pred))
    }

    /// Axis-aligned ellipsoid `{Σ ((x_i − c_i)/a_i)² ≤ 1}`.
    pub fn ellipsoid(center: Vec<f64>, semi_axes: Vec<f64>) -> Result<Self> {
        if center.len() != semi_axes.len() {
            return Err(Error::Dimension { expected: center.len(), got: semi_axes.len() });
        }
        if semi_axes.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
            return Err(Error::Construction("ellipsoid semi-axes must be positive".into()));
        }
        let n = center.len() as f64;
        let r = semi_axes.iter().cloned().fold(f64::INFINITY, f64::min);
        let d = 2.0 * semi_axes.iter().cloned().fold(0.0, f64::max);
        let r_bound = (semi_axes.iter().map(|a| a * a).sum::<f64>() / (n + 2.0)).sqrt();
        let (c, ax) = (center.clone(), semi_axes);
        let pred = move |x: &[f64]| {
            Ok(x.iter().zip(c.iter().zip(&ax)).map(|(v, (ci, ai))| ((v - ci) / ai).powi(2)).sum::<f64>() <= 1.0)
        };
        Self::raw(center.len(), center, r, Some(r_bound), Some(d), "ellipsoid", Arc::new(pred))
    }

    /// `K ∩ B_radius(ball_center)`. When the ball shares this body's center
    /// the inner radius is `min(r, radius)`; otherwise the caller must pass a
    /// `(center, radius)` witness for the intersection.
    pub fn intersection_with_ball(
        &self,
        radius: f64,
        ball_center: Vec<f64>,
        witness: Option<(Vec<f64>, f64)>,
    ) -> Result<Self> {
        if ball_center.len() != self.dim {
            return Err(Error::Dimension { expected: self.dim, got: ball_center.len() });
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Construction(format!("ball radius must be positive, got {radius}")));
        }
        let (center, r) = match witness {
            Some((c, r)) => {
                if c.len() != self.dim {
                    return Err(Error::Dimension { expected: self.dim, got: c.len() });
                }
                (c, r)
            }
            None if ball_center == self.center => (self.center.clone(), self.inner_radius.min(radius)),
            None => {
                return Err(Error::Construction(
                    "intersection with an off-center ball needs an inner-ball witness".into(),
                ))
            }
        };
        let diameter = Some(self.diameter.map_or(2.0 * radius, |d| d.min(2.0 * radius)));
        let r_bound = Some(radius + dist(&ball_center, &center));
        let inner = Arc::clone(&self.pred);
        let r2 = radius * radius;
        let bc = ball_center;
        let pred = move |x: &[f64]| {
            if x.iter().zip(&bc).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() > r2 {
                return Ok(false);
            }
            inner(x)
        };
        let mut body = Self::raw(self.dim, center, r, r_bound, diameter, "intersection_with_ball", Arc::new(pred))?;
        body.ledger = Arc::clone(&self.ledger);
        body.t_range = self.t_range;
        if !(body.pred)(&body.center)? {
            return Err(Error::Construction("witness center is not in the intersection".into()));
        }
        Ok(body)
    }

    /// `K − shift`: membership of `x` is membership of `x + shift` in `K`.
    pub fn translated(&self, shift: &[f64]) -> Result<Self> {
        if shift.len() != self.dim {
            return Err(Error::Dimension { expected: self.dim, got: shift.len() });
        }
        let inner = Arc::clone(&self.pred);
        let s = shift.to_vec();
        let pred = move |x: &[f64]| {
            let moved: Vec<f64> = x.iter().zip(&s).map(|(a, b)| a + b).collect();
            inner(&moved)
        };
        let mut body = self.clone();
        body.center = self.center.iter().zip(shift).map(|(a, b)| a - b).collect();
        body.box_bounds = self.box_bounds.as_ref().map(|(lo, hi)| {
            (
                lo.iter().zip(shift).map(|(a, b)| a - b).collect(),
                hi.iter().zip(shift).map(|(a, b)| a - b).collect(),
            )
        });
        body.label = format!("{} (translated)", self.label);
        body.pred = Arc::new(pred);
        Ok(body)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn inner_radius(&self) -> f64 {
        self.inner_radius
    }

    pub fn r_bound(&self) -> Option<f64> {
        self.r_bound
    }

    pub fn diameter(&self) -> Option<f64> {
        self.diameter
    }

    /// `t`-interval of a truncated epigraph body.
    pub fn t_range(&self) -> Option<(f64, f64)> {
        self.t_range
    }

    /// `(lo, hi)` when this body is a plain axis box (possibly translated).
    pub fn box_bounds(&self) -> Option<(&[f64], &[f64])> {
        self.box_bounds.as_ref().map(|(l, h)| (l.as_slice(), h.as_slice()))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn ledger(&self) -> &Arc<QueryLedger> {
        &self.ledger
    }

    /// Counted membership query.
    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        if x.len() != self.dim {
            return Err(Error::Dimension { expected: self.dim, got: x.len() });
        }
        self.ledger.record_membership();
        (self.pred)(x)
    }

    pub(crate) fn contains_uncounted(&self, x: &[f64]) -> Result<bool> {
        if x.len() != self.dim {
            return Err(Error::Dimension { expected: self.dim, got: x.len() });
        }
        (self.pred)(x)
    }

    /// Probes `center + r·u` for random unit `u` (uncounted). Fails on the
    /// first probe outside the body.
    pub fn spot_check_inner_ball<R: Rng + ?Sized>(&self, rng: &mut R, probes: usize) -> Result<()> {
        if !(self.pred)(&self.center)? {
            return Err(Error::Data("center is not a member".into()));
        }
        for _ in 0..probes {
            let u = random_unit(rng, self.dim);
            // A hair inside the sphere so boundary rounding does not trip
            // closed-set predicates.
            let r = self.inner_radius * (1.0 - 1e-12);
            let x: Vec<f64> = self.center.iter().zip(&u).map(|(c, d)| c + r * d).collect();
            if !(self.pred)(&x)? {
                return Err(Error::Data(format!("inner-ball witness fails at {x:?}")));
            }
        }
        Ok(())
    }
}

/// `K = {(x, t) : V(x) ≤ n·t}` in dimension `n + 1`. Shares the potential's
/// ledger; every membership query spends exactly one evaluation query.
///
/// The declared center is `(x0, 11)` with inner radius 1, which holds when
/// `B_1(x0)` lies in the ground set `{V − min V ≤ 10n}` and `min V = 0`
/// (use [`Potential::recentered`] first).
pub fn epigraph_body(pot: &Potential) -> Result<Body> {
    let n = pot.dim();
    let nf = n as f64;
    let p = pot.clone();
    let pred = move |z: &[f64]| {
        let v = p.evaluate(&z[..n])?;
        Ok(v <= nf * z[n])
    };
    let mut center = pot.x0().to_vec();
    center.push(11.0);
    let mut body = Body::raw(n + 1, center, 1.0, Some(pot.r_bound()), None, "epigraph", Arc::new(pred))?;
    body.ledger = Arc::clone(pot.ledger());
    Ok(body)
}

/// `l = ln(2e/ε)` used by [`truncate_for_logconcave`].
pub fn logconcave_truncation_level(eps: f64) -> f64 {
    (2.0 * std::f64::consts::E / eps).ln()
}

/// `K̄ = K ∩ (B_{R·l}(0) × [−21, 13l − 6])` for an epigraph body centered
/// at the origin, with `l = ln(2e/ε)`. The box/ball test runs before the
/// wrapped predicate, so points outside the truncation cost no evaluation.
pub fn truncate_for_logconcave(k_epi: &Body, r: f64, eps: f64) -> Result<Body> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Usage(format!("eps must lie in (0,1), got {eps}")));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Usage(format!("R must be positive, got {r}")));
    }
    let n = k_epi.dim() - 1;
    if k_epi.center()[..n].iter().any(|v| *v != 0.0) {
        return Err(Error::Usage("translate the epigraph so that x0 = 0 first".into()));
    }
    let l = logconcave_truncation_level(eps);
    let rad = r * l;
    let (t_lo, t_hi) = (-21.0, 13.0 * l - 6.0);
    let inner = Arc::clone(&k_epi.pred);
    let rad2 = rad * rad;
    let pred = move |z: &[f64]| {
        let t = z[n];
        if !(t_lo <= t && t <= t_hi) || z[..n].iter().map(|v| v * v).sum::<f64>() > rad2 {
            return Ok(false);
        }
        inner(z)
    };
    let mut body = k_epi.clone();
    body.pred = Arc::new(pred);
    body.diameter = Some(rad);
    body.r_bound = Some(r);
    body.t_range = Some((t_lo, t_hi));
    body.box_bounds = None;
    body.label = format!("{} (truncated)", k_epi.label);
    Ok(body)
}

/// `L = ln(e/ε)` used by [`truncate_to_ball`].
pub fn ball_truncation_level(eps: f64) -> f64 {
    (std::f64::consts::E / eps).ln()
}

/// `K ∩ B_{L·R}(x0)` with `L = ln(e/ε)`; the diameter becomes `2LR`.
pub fn truncate_to_ball(body: &Body, eps: f64) -> Result<Body> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Usage(format!("eps must lie in (0,1], got {eps}")));
    }
    let r = body
        .r_bound()
        .ok_or_else(|| Error::Usage("truncate_to_ball needs a body with declared R".into()))?;
    let l = ball_truncation_level(eps);
    let rad = l * r;
    let inner = Arc::clone(&body.pred);
    let c = body.center.clone();
    let rad2 = rad * rad;
    let pred = move |x: &[f64]| {
        if x.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() > rad2 {
            return Ok(false);
        }
        inner(x)
    };
    let mut out = body.clone();
    out.pred = Arc::new(pred);
    out.inner_radius = body.inner_radius.min(rad);
    out.diameter = Some((2.0 * rad).max(out.inner_radius));
    out.box_bounds = None;
    out.label = format!("{} (ball-truncated)", body.label);
    Ok(out)
}
