//! JSON descriptors: `{"kind": ..., "n": ..., "params": {...}}`.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{Body, Potential};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetDescriptor {
    pub kind: String,
    pub n: usize,
    #[serde(default = "empty_params")]
    pub params: serde_json::Value,
}

fn empty_params() -> serde_json::Value {
    serde_json::Value::Object(Default::default())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BoxParams {
    #[serde(default)]
    half_width: Option<f64>,
    #[serde(default)]
    lo: Option<Vec<f64>>,
    #[serde(default)]
    hi: Option<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BallParams {
    #[serde(default = "one")]
    radius: f64,
    #[serde(default)]
    center: Option<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PolytopeParams {
    /// Row-major, `m × n`.
    a: Vec<f64>,
    b: Vec<f64>,
    center: Vec<f64>,
    r_bound: f64,
    #[serde(default)]
    diameter: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SimplexParams {
    #[serde(default)]
    center: Option<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EllipsoidParams {
    semi_axes: Vec<f64>,
    #[serde(default)]
    center: Option<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IntersectionParams {
    body: TargetDescriptor,
    radius: f64,
    #[serde(default)]
    ball_center: Option<Vec<f64>>,
    #[serde(default)]
    witness_center: Option<Vec<f64>>,
    #[serde(default)]
    witness_radius: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct QuadraticParams {
    #[serde(default)]
    center: Option<Vec<f64>>,
    #[serde(default = "one")]
    variance: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct L1Params {
    #[serde(default = "one")]
    scale: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IndicatorParams {
    body: TargetDescriptor,
}

fn one() -> f64 {
    1.0
}

fn params<T: DeserializeOwned>(d: &TargetDescriptor) -> Result<T> {
    serde_json::from_value(d.params.clone())
        .map_err(|e| Error::Config(format!("params of '{}': {e}", d.kind)))
}

fn sized(what: &str, v: Option<Vec<f64>>, n: usize, default: f64) -> Result<Vec<f64>> {
    match v {
        None => Ok(vec![default; n]),
        Some(v) if v.len() == n => Ok(v),
        Some(v) => Err(Error::Config(format!("{what} has length {}, expected n = {n}", v.len()))),
    }
}

impl TargetDescriptor {
    pub fn new(kind: &str, n: usize, params: serde_json::Value) -> Self {
        Self { kind: kind.into(), n, params }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn is_potential(&self) -> bool {
        self.kind.starts_with("potential_")
    }

    pub fn to_body(&self) -> Result<Body> {
        let n = self.n;
        if n == 0 {
            return Err(Error::Config("n must be positive".into()));
        }
        match self.kind.as_str() {
            "axis_box" => {
                let p: BoxParams = params(self)?;
                match (p.half_width, p.lo, p.hi) {
                    (Some(w), None, None) => Body::cube(n, w),
                    (None, Some(lo), Some(hi)) => {
                        if lo.len() != n || hi.len() != n {
                            return Err(Error::Config(format!("lo/hi must have length n = {n}")));
                        }
                        Body::axis_box(lo, hi)
                    }
                    (None, None, None) => Body::cube(n, 1.0),
                    _ => Err(Error::Config("axis_box takes either half_width or lo/hi".into())),
                }
            }
            "ball" => {
                let p: BallParams = params(self)?;
                Body::ball(sized("center", p.center, n, 0.0)?, p.radius)
            }
            "polytope" | "halfspace_polytope" => {
                let p: PolytopeParams = params(self)?;
                if p.a.len() != p.b.len() * n {
                    return Err(Error::Config(format!(
                        "A has {} entries; expected {} rows × n = {n}",
                        p.a.len(),
                        p.b.len()
                    )));
                }
                let rows = p.a.chunks(n).map(|r| r.to_vec()).collect();
                Body::polytope(rows, p.b, sized("center", Some(p.center), n, 0.0)?, p.r_bound, p.diameter)
            }
            "simplex" => {
                let p: SimplexParams = params(self)?;
                Body::simplex(n, p.center)
            }
            "ellipsoid" => {
                let p: EllipsoidParams = params(self)?;
                let axes = sized("semi_axes", Some(p.semi_axes), n, 1.0)?;
                Body::ellipsoid(sized("center", p.center, n, 0.0)?, axes)
            }
            "intersection_with_ball" => {
                let p: IntersectionParams = params(self)?;
                if p.body.n != n {
                    return Err(Error::Config("inner body dimension differs from n".into()));
                }
                let inner = p.body.to_body()?;
                let bc = match p.ball_center {
                    Some(c) => sized("ball_center", Some(c), n, 0.0)?,
                    None => inner.center().to_vec(),
                };
                let witness = match (p.witness_center, p.witness_radius) {
                    (Some(c), Some(r)) => Some((sized("witness_center", Some(c), n, 0.0)?, r)),
                    (None, None) => None,
                    _ => return Err(Error::Config("witness needs both witness_center and witness_radius".into())),
                };
                inner.intersection_with_ball(p.radius, bc, witness)
            }
            k if k.starts_with("potential_") => {
                Err(Error::Config(format!("'{k}' describes a potential, not a body")))
            }
            k => Err(Error::Config(format!("unknown body kind '{k}'"))),
        }
    }

    pub fn to_potential(&self) -> Result<Potential> {
        let n = self.n;
        if n == 0 {
            return Err(Error::Config("n must be positive".into()));
        }
        match self.kind.as_str() {
            "potential_quadratic" => {
                let p: QuadraticParams = params(self)?;
                Potential::quadratic(sized("center", p.center, n, 0.0)?, p.variance)
            }
            "potential_l1" => {
                let p: L1Params = params(self)?;
                Potential::l1(n, p.scale)
            }
            "potential_indicator" => {
                let p: IndicatorParams = params(self)?;
                Potential::indicator(&p.body.to_body()?)
            }
            k => Err(Error::Config(format!("unknown potential kind '{k}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn parses_standard_bodies() {
        let cube = TargetDescriptor::from_json(r#"{"kind":"axis_box","n":5,"params":{"half_width":1}}"#)
            .unwrap()
            .to_body()
            .unwrap();
        assert_eq!(cube.dim(), 5);
        let poly = TargetDescriptor::new(
            "polytope",
            2,
            json!({"a": [1.0, 1.0, -1.0, 0.0, 0.0, -1.0], "b": [1.0, 0.0, 0.0], "center": [0.25, 0.25], "r_bound": 1.0}),
        )
        .to_body()
        .unwrap();
        assert!(poly.contains(&[0.4, 0.5]).unwrap());
        let inter = TargetDescriptor::new(
            "intersection_with_ball",
            3,
            json!({"body": {"kind": "axis_box", "n": 3}, "radius": 0.5}),
        )
        .to_body()
        .unwrap();
        assert_eq!(inter.inner_radius(), 0.5);
    }

    #[test]
    fn parses_potentials() {
        let q = TargetDescriptor::new("potential_quadratic", 2, json!({})).to_potential().unwrap();
        assert_eq!(q.evaluate(&[3.0, 4.0]).unwrap(), 12.5);
        let ind = TargetDescriptor::new("potential_indicator", 1, json!({"body": {"kind": "ball", "n": 1}}))
            .to_potential()
            .unwrap();
        assert_eq!(ind.evaluate(&[2.0]).unwrap(), f64::INFINITY);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(TargetDescriptor::from_json(r#"{"kind":"ball","n":2,"extra":1}"#).is_err());
        let e = TargetDescriptor::new("ball", 2, json!({"radius": 1.0, "wobble": 2})).to_body().unwrap_err();
        assert!(e.to_string().contains("wobble"));
        assert!(TargetDescriptor::new("torus", 2, json!({})).to_body().is_err());
    }
}
