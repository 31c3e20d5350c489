//! Catalog of test surfaces with exact jets.

use super::{Rect, SurfaceChart};
use crate::error::{Error, Result};
use crate::jet::{Jet, JetVec3};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

pub const CATALOG_NAMES: [&str; 8] = [
    "sphere", "cylinder", "cone", "plane", "ellipsoid", "torus", "catenoid", "graph",
];

/// Graph monomials `uⁱvʲ` with `1 ≤ i + j ≤ 3`, and their parameter keys.
const GRAPH_TERMS: [(&str, i32, i32, f64); 9] = [
    ("c10", 1, 0, 0.0),
    ("c01", 0, 1, 0.0),
    ("c20", 2, 0, 0.5),
    ("c11", 1, 1, 0.1),
    ("c02", 0, 2, -0.25),
    ("c30", 3, 0, 0.1),
    ("c21", 2, 1, 0.0),
    ("c12", 1, 2, -0.2),
    ("c03", 0, 3, 0.05),
];

#[derive(Clone, Debug, PartialEq)]
pub enum SurfaceKind {
    /// `ρ(sin u cos v, sin u sin v, cos u)`.
    Sphere { radius: f64 },
    /// `(ρ cos u, ρ sin u, v)`.
    Cylinder { radius: f64 },
    /// `u/√(r²+1) · (r cos(√(r²+1)v/r), r sin(√(r²+1)v/r), 1)`, `u > 0`.
    Cone { r: f64 },
    /// `(u, v, 0)`.
    Plane,
    /// `(α sin u cos v, β sin u sin v, γ cos u)`.
    Ellipsoid { axes: [f64; 3] },
    /// `((R + r cos v) cos u, (R + r cos v) sin u, r sin v)`.
    Torus { major: f64, minor: f64 },
    /// `(c cosh(u/c) cos v, c cosh(u/c) sin v, u)`.
    Catenoid { scale: f64 },
    /// `(u, v, Σ cᵢⱼ uⁱ vʲ)` with `1 ≤ i + j ≤ 3`.
    Graph { coeffs: [f64; 9] },
}

impl SurfaceKind {
    pub(crate) fn position(&self, u: Jet, v: Jet) -> JetVec3 {
        match *self {
            SurfaceKind::Sphere { radius } => {
                let s = u.sin();
                [s * v.cos() * radius, s * v.sin() * radius, u.cos() * radius]
            }
            SurfaceKind::Cylinder { radius } => [u.cos() * radius, u.sin() * radius, v],
            SurfaceKind::Cone { r } => {
                let s = (r * r + 1.0).sqrt();
                let theta = v * (s / r);
                let w = u / s;
                [w * theta.cos() * r, w * theta.sin() * r, w]
            }
            SurfaceKind::Plane => [u, v, Jet::constant(0.0)],
            SurfaceKind::Ellipsoid { axes } => {
                let s = u.sin();
                [s * v.cos() * axes[0], s * v.sin() * axes[1], u.cos() * axes[2]]
            }
            SurfaceKind::Torus { major, minor } => {
                let w = v.cos() * minor + major;
                [w * u.cos(), w * u.sin(), v.sin() * minor]
            }
            SurfaceKind::Catenoid { scale } => {
                let w = (u / scale).cosh() * scale;
                [w * v.cos(), w * v.sin(), u]
            }
            SurfaceKind::Graph { coeffs } => {
                let mut z = Jet::constant(0.0);
                for (c, &(_, i, j, _)) in coeffs.iter().zip(GRAPH_TERMS.iter()) {
                    if *c != 0.0 {
                        z = z + u.powi(i) * v.powi(j) * *c;
                    }
                }
                [u, v, z]
            }
        }
    }
}

fn take(params: &BTreeMap<String, f64>, key: &str, default: f64) -> f64 {
    params.get(key).copied().unwrap_or(default)
}

fn positive(name: &str, key: &str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParams(format!("{name}: `{key}` must be positive, got {value}")))
    }
}

fn check_keys(name: &str, params: &BTreeMap<String, f64>, allowed: &[&str]) -> Result<()> {
    match params.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(Error::InvalidParams(format!(
            "{name}: unknown parameter `{k}` (expected one of {allowed:?})"
        ))),
        None => Ok(()),
    }
}

/// Builds a catalog chart with its default domain.
///
/// Parameters (defaults in parentheses): sphere `radius` (1), cylinder
/// `radius` (1), cone `r` (1), ellipsoid `a`,`b`,`c` (1, 1, 2), torus `R`,`r`
/// (2, 0.7), catenoid `scale` (1), graph `c10 … c03` (a fixed cubic).
pub fn catalog_surface(name: &str, params: &BTreeMap<String, f64>) -> Result<SurfaceChart> {
    let two_pi = 2.0 * PI;
    let (kind, domain) = match name {
        "sphere" => {
            check_keys(name, params, &["radius"])?;
            let radius = positive(name, "radius", take(params, "radius", 1.0))?;
            (SurfaceKind::Sphere { radius }, Rect::new([0.15, PI - 0.15], [0.0, two_pi]))
        }
        "cylinder" => {
            check_keys(name, params, &["radius"])?;
            let radius = positive(name, "radius", take(params, "radius", 1.0))?;
            (SurfaceKind::Cylinder { radius }, Rect::new([0.0, two_pi], [-1.0, 1.0]))
        }
        "cone" => {
            check_keys(name, params, &["r"])?;
            let r = positive(name, "r", take(params, "r", 1.0))?;
            let period = two_pi * r / (r * r + 1.0).sqrt();
            (SurfaceKind::Cone { r }, Rect::new([0.5, 2.0], [0.0, period]))
        }
        "plane" => {
            check_keys(name, params, &[])?;
            (SurfaceKind::Plane, Rect::new([-1.0, 1.0], [-1.0, 1.0]))
        }
        "ellipsoid" => {
            check_keys(name, params, &["a", "b", "c"])?;
            let axes = [
                positive(name, "a", take(params, "a", 1.0))?,
                positive(name, "b", take(params, "b", 1.0))?,
                positive(name, "c", take(params, "c", 2.0))?,
            ];
            (SurfaceKind::Ellipsoid { axes }, Rect::new([0.15, PI - 0.15], [0.0, two_pi]))
        }
        "torus" => {
            check_keys(name, params, &["R", "r"])?;
            let major = positive(name, "R", take(params, "R", 2.0))?;
            let minor = positive(name, "r", take(params, "r", 0.7))?;
            if minor >= major {
                return Err(Error::InvalidParams(format!(
                    "torus: need r < R for an immersed torus, got R={major}, r={minor}"
                )));
            }
            (SurfaceKind::Torus { major, minor }, Rect::new([0.0, two_pi], [0.0, two_pi]))
        }
        "catenoid" => {
            check_keys(name, params, &["scale"])?;
            let scale = positive(name, "scale", take(params, "scale", 1.0))?;
            (SurfaceKind::Catenoid { scale }, Rect::new([-scale, scale], [0.0, two_pi]))
        }
        "graph" => {
            let keys: Vec<&str> = GRAPH_TERMS.iter().map(|t| t.0).collect();
            check_keys(name, params, &keys)?;
            let mut coeffs = [0.0; 9];
            for (c, &(key, _, _, default)) in coeffs.iter_mut().zip(GRAPH_TERMS.iter()) {
                *c = take(params, key, default);
                if !c.is_finite() {
                    return Err(Error::InvalidParams(format!("graph: `{key}` is not finite")));
                }
            }
            (SurfaceKind::Graph { coeffs }, Rect::new([-1.0, 1.0], [-1.0, 1.0]))
        }
        other => return Err(Error::UnknownSurface(other.to_string())),
    };
    Ok(SurfaceChart::new(name, params.clone(), kind, domain, Vec::new()))
}

/// JSON surface definition:
/// `{"surface": "<name>", "params": {...}, "domain": [[u0,u1],[v0,v1]], "exclusions": [...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceDoc {
    pub surface: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub domain: Option<[[f64; 2]; 2]>,
    #[serde(default)]
    pub exclusions: Vec<[[f64; 2]; 2]>,
}

impl SurfaceDoc {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_chart(&self) -> Result<SurfaceChart> {
        let mut chart = catalog_surface(&self.surface, &self.params)?;
        if let Some([u, v]) = self.domain {
            let r = Rect::new(u, v);
            if !r.is_valid() {
                return Err(Error::InvalidParams(format!("empty or non-finite domain {u:?} x {v:?}")));
            }
            chart = chart.with_domain(r);
        }
        let mut exclusions = Vec::with_capacity(self.exclusions.len());
        for &[u, v] in &self.exclusions {
            let r = Rect::new(u, v);
            if !r.is_valid() {
                return Err(Error::InvalidParams(format!("empty or non-finite exclusion {u:?} x {v:?}")));
            }
            exclusions.push(r);
        }
        Ok(chart.with_exclusions(exclusions))
    }
}
