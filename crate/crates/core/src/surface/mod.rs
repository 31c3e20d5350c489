//! Parametric surface charts in `R³` and their local differential geometry.
//!
//! Orientation convention: the unit normal is always
//! `N = (∂ᵤx × ∂ᵥx) / |∂ᵤx × ∂ᵥx|`, and the shape operator follows the
//! Weingarten formula `∇̃_X N = −AX`, so `A = g⁻¹ hN` with
//! `(hN)ᵢⱼ = ⟨∂ᵢ∂ⱼx, N⟩`. A round sphere of radius `ρ` with outward normal has
//! `a = b = −1/ρ`.

mod catalog;
mod principal;

pub use catalog::{catalog_surface, SurfaceDoc, SurfaceKind, CATALOG_NAMES};
pub use principal::{
    codazzi_residual, fundamental_forms, principal_frame, principal_frame_with, shape_operator_jet,
    FundamentalForms, PrincipalData, ShapeOperatorJet, UmbilicPolicy,
};

use crate::jet::{self, Jet, JetVec3};
use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A point of the chart domain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint {
    pub u: f64,
    pub v: f64,
}

impl ChartPoint {
    pub const fn new(u: f64, v: f64) -> Self {
        ChartPoint { u, v }
    }
}

/// Axis-aligned rectangle `[u₀,u₁] × [v₀,v₁]` in chart coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub u: [f64; 2],
    pub v: [f64; 2],
}

impl Rect {
    pub const fn new(u: [f64; 2], v: [f64; 2]) -> Self {
        Rect { u, v }
    }

    pub fn contains(&self, p: ChartPoint) -> bool {
        p.u >= self.u[0] && p.u <= self.u[1] && p.v >= self.v[0] && p.v <= self.v[1]
    }

    pub fn contains_open(&self, p: ChartPoint) -> bool {
        p.u > self.u[0] && p.u < self.u[1] && p.v > self.v[0] && p.v < self.v[1]
    }

    pub fn is_valid(&self) -> bool {
        self.u.iter().chain(&self.v).all(|x| x.is_finite()) && self.u[0] < self.u[1] && self.v[0] < self.v[1]
    }

    /// Cell-centred `nu × nv` sample points, `u` varying slowest.
    pub fn cell_centers(&self, nu: usize, nv: usize) -> Vec<ChartPoint> {
        let du = (self.u[1] - self.u[0]) / nu as f64;
        let dv = (self.v[1] - self.v[0]) / nv as f64;
        let mut pts = Vec::with_capacity(nu * nv);
        for i in 0..nu {
            for j in 0..nv {
                pts.push(ChartPoint::new(
                    self.u[0] + (i as f64 + 0.5) * du,
                    self.v[0] + (j as f64 + 0.5) * dv,
                ));
            }
        }
        pts
    }
}

/// All partial derivatives of the position map through total order 3 at a point.
#[derive(Clone, Copy, Debug)]
pub struct ChartJets {
    d: [Vector3<f64>; jet::LEN],
}

impl ChartJets {
    /// `∂ᵤⁱ∂ᵥʲ x`.
    pub fn d(&self, i: usize, j: usize) -> Vector3<f64> {
        self.d[jet::index(i, j)]
    }

    pub fn position(&self) -> Vector3<f64> {
        self.d[0]
    }
}

/// A single parametric patch with analytic order-3 jets.
#[derive(Clone, Debug)]
pub struct SurfaceChart {
    name: String,
    params: BTreeMap<String, f64>,
    kind: SurfaceKind,
    domain: Rect,
    exclusions: Vec<Rect>,
    reflect_v: bool,
    diam: f64,
}

impl SurfaceChart {
    pub(crate) fn new(
        name: &str,
        params: BTreeMap<String, f64>,
        kind: SurfaceKind,
        domain: Rect,
        exclusions: Vec<Rect>,
    ) -> Self {
        let mut chart = SurfaceChart {
            name: name.to_string(),
            params,
            kind,
            domain,
            exclusions,
            reflect_v: false,
            diam: 1.0,
        };
        chart.diam = chart.estimate_diameter();
        chart
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn kind(&self) -> &SurfaceKind {
        &self.kind
    }

    pub fn domain(&self) -> Rect {
        self.domain
    }

    pub fn exclusions(&self) -> &[Rect] {
        &self.exclusions
    }

    /// Characteristic length: the largest distance between points of a 9×9
    /// sample of the patch.
    pub fn diameter(&self) -> f64 {
        self.diam
    }

    pub fn with_domain(mut self, domain: Rect) -> Self {
        self.domain = domain;
        self.diam = self.estimate_diameter();
        self
    }

    pub fn with_exclusions(mut self, exclusions: Vec<Rect>) -> Self {
        self.exclusions = exclusions;
        self
    }

    /// The same surface traversed with `v ↦ v₀ + v₁ − v`, which reverses the
    /// unit normal while keeping the domain.
    pub fn with_flipped_normal(mut self) -> Self {
        self.reflect_v = !self.reflect_v;
        self
    }

    pub fn normal_flipped(&self) -> bool {
        self.reflect_v
    }

    /// True when `p` lies in the domain and outside every exclusion.
    pub fn admits(&self, p: ChartPoint) -> bool {
        self.domain.contains(p) && !self.exclusions.iter().any(|r| r.contains_open(p))
    }

    /// Admissible cell-centred grid points.
    pub fn grid(&self, nu: usize, nv: usize) -> Vec<ChartPoint> {
        self.domain
            .cell_centers(nu, nv)
            .into_iter()
            .filter(|&p| self.admits(p))
            .collect()
    }

    /// Position map evaluated on jets.
    pub fn position_jet(&self, u: Jet, v: Jet) -> JetVec3 {
        let v = if self.reflect_v {
            (self.domain.v[0] + self.domain.v[1]) - v
        } else {
            v
        };
        self.kind.position(u, v)
    }

    /// The position jet seeded at `p`.
    pub fn jet_at(&self, p: ChartPoint) -> JetVec3 {
        self.position_jet(Jet::var_u(p.u), Jet::var_v(p.v))
    }

    pub fn jets(&self, p: ChartPoint) -> ChartJets {
        let x = self.jet_at(p);
        let mut d = [Vector3::zeros(); jet::LEN];
        for (k, &(i, j)) in jet::MONOMIALS.iter().enumerate() {
            d[k] = Vector3::new(x[0].partial(i, j), x[1].partial(i, j), x[2].partial(i, j));
        }
        ChartJets { d }
    }

    pub fn position(&self, p: ChartPoint) -> Vector3<f64> {
        let x = self.position_jet(Jet::constant(p.u), Jet::constant(p.v));
        Vector3::new(x[0].value(), x[1].value(), x[2].value())
    }

    fn estimate_diameter(&self) -> f64 {
        let n = 9;
        let mut pts = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let s = i as f64 / (n - 1) as f64;
                let r = j as f64 / (n - 1) as f64;
                let p = ChartPoint::new(
                    self.domain.u[0] + s * (self.domain.u[1] - self.domain.u[0]),
                    self.domain.v[0] + r * (self.domain.v[1] - self.domain.v[0]),
                );
                pts.push(self.position(p));
            }
        }
        let mut d: f64 = 0.0;
        for a in &pts {
            for b in &pts {
                d = d.max((a - b).norm());
            }
        }
        if d.is_finite() && d > 0.0 {
            d
        } else {
            1.0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_centers_avoid_the_midline_for_even_counts() {
        let r = Rect::new([0.0, 1.0], [0.0, 2.0]);
        let pts = r.cell_centers(4, 2);
        assert_eq!(pts.len(), 8);
        assert!(pts.iter().all(|p| p.u != 0.5 && p.v != 1.0));
        assert_eq!(pts[0], ChartPoint::new(0.125, 0.5));
        assert_eq!(pts[1], ChartPoint::new(0.125, 1.5));
    }

    #[test]
    fn exclusions_are_open_rectangles() {
        let chart = catalog_surface("plane", &BTreeMap::new())
            .unwrap()
            .with_exclusions(vec![Rect::new([-0.5, 0.5], [-0.5, 0.5])]);
        assert!(!chart.admits(ChartPoint::new(0.0, 0.0)));
        assert!(chart.admits(ChartPoint::new(0.5, 0.0)));
        assert!(!chart.admits(ChartPoint::new(3.0, 0.0)));
    }

    #[test]
    fn mixed_partials_are_symmetric() {
        let chart = catalog_surface("torus", &BTreeMap::new()).unwrap();
        let x = chart.jet_at(ChartPoint::new(0.3, 1.1));
        for c in &x {
            let uv = c.d_u().d_v();
            let vu = c.d_v().d_u();
            assert_eq!(uv.value(), vu.value());
            assert!((uv.partial(1, 0) - vu.partial(1, 0)).abs() < 1e-15);
        }
    }

    #[test]
    fn flipped_chart_keeps_the_image() {
        let chart = catalog_surface("ellipsoid", &BTreeMap::new()).unwrap();
        let flipped = chart.clone().with_flipped_normal();
        let d = chart.domain();
        let p = ChartPoint::new(1.0, 0.4);
        let q = ChartPoint::new(1.0, d.v[0] + d.v[1] - 0.4);
        assert!((chart.position(p) - flipped.position(q)).norm() < 1e-14);
    }
}
