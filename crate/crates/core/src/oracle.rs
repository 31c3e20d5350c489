//! Brute-force geometry of the immersed 3-manifold `f(U × R) ⊂ R⁶`.
//!
//! Everything here is computed from the raw chart jets of `x(u, v)`: the
//! unit normal and its derivatives are formed directly from cross products,
//! the induced metric and Christoffel symbols from the derivatives of
//! `f(u, v, t) = (x, tN)`, and the mean curvature vector as the
//! Laplace–Beltrami operator applied to the immersion,
//! `H = G^{ij}(∂ᵢ∂ⱼf − Γᵏᵢⱼ ∂ₖf)`. None of the closed-form bundle formulas,
//! principal curvatures or their derivatives are used.

use crate::bundle::{complex_structure, BundleFrames, BundlePoint};
use crate::error::{Error, Result};
use crate::surface::{ChartPoint, SurfaceChart};
use crate::Vec6;
use nalgebra::{Matrix3, Vector3};

/// Coordinate step of the central differences taken on the `H` field.
pub const FD_STEP: f64 = 1e-4;

/// `|H|` below which the Maslovian condition is vacuous, per unit of `1/diam`.
pub const VANISHING_H_REL: f64 = 1e-9;

const DEGENERATE_REL: f64 = 1e-12;

/// Derivatives of the bundle immersion at one point, coordinates `(u, v, t)`.
#[derive(Clone, Copy, Debug)]
pub struct BundleJet {
    pub f: Vec6,
    /// `∂ᵢf`.
    pub df: [Vec6; 3],
    /// `∂ᵢ∂ⱼf`, symmetric.
    pub ddf: [[Vec6; 3]; 3],
    metric: Matrix3<f64>,
    metric_inv: Matrix3<f64>,
}

impl BundleJet {
    pub fn metric(&self) -> Matrix3<f64> {
        self.metric
    }

    pub fn metric_inverse(&self) -> Matrix3<f64> {
        self.metric_inv
    }

    /// `Γᵏᵢⱼ`, indexed `[k][(i, j)]`.
    pub fn christoffel(&self) -> [Matrix3<f64>; 3] {
        let mut lowered = [[[0.0; 3]; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for l in 0..3 {
                    lowered[i][j][l] = self.ddf[i][j].dot(&self.df[l]);
                }
            }
        }
        let mut gamma = [Matrix3::zeros(); 3];
        for (k, gk) in gamma.iter_mut().enumerate() {
            for i in 0..3 {
                for j in 0..3 {
                    gk[(i, j)] = (0..3).map(|l| self.metric_inv[(k, l)] * lowered[i][j][l]).sum();
                }
            }
        }
        gamma
    }

    /// Coordinate components of the tangential part of `w`.
    pub fn tangent_coords(&self, w: &Vec6) -> Vector3<f64> {
        let rhs = Vector3::new(self.df[0].dot(w), self.df[1].dot(w), self.df[2].dot(w));
        self.metric_inv * rhs
    }

    pub fn tangential_project(&self, w: &Vec6) -> Vec6 {
        let c = self.tangent_coords(w);
        self.df[0] * c[0] + self.df[1] * c[1] + self.df[2] * c[2]
    }

    pub fn mean_curvature(&self) -> Vec6 {
        let gamma = self.christoffel();
        let mut h = Vec6::zeros();
        for i in 0..3 {
            for j in 0..3 {
                let gij = self.metric_inv[(i, j)];
                if gij == 0.0 {
                    continue;
                }
                let mut second = self.ddf[i][j];
                for (k, gk) in gamma.iter().enumerate() {
                    second -= self.df[k] * gk[(i, j)];
                }
                h += second * gij;
            }
        }
        h
    }
}

/// Evaluates the bundle immersion built from a chart.
#[derive(Clone, Copy, Debug)]
pub struct JetEvaluator<'a> {
    chart: &'a SurfaceChart,
}

/// Unit normal with its first and second partials, from the chart jets.
struct NormalJet {
    n: Vector3<f64>,
    d: [Vector3<f64>; 2],
    dd: [[Vector3<f64>; 2]; 2],
}

fn normal_jet(chart: &SurfaceChart, p: ChartPoint) -> NormalJet {
    let j = chart.jets(p);
    let x = |i: usize, k: usize| j.d(i, k);
    // m = x_u × x_v and its partials.
    let m = x(1, 0).cross(&x(0, 1));
    let m_u = x(2, 0).cross(&x(0, 1)) + x(1, 0).cross(&x(1, 1));
    let m_v = x(1, 1).cross(&x(0, 1)) + x(1, 0).cross(&x(0, 2));
    let m_uu = x(3, 0).cross(&x(0, 1)) + x(2, 0).cross(&x(1, 1)) * 2.0 + x(1, 0).cross(&x(2, 1));
    let m_uv = x(2, 1).cross(&x(0, 1)) + x(2, 0).cross(&x(0, 2)) + x(1, 0).cross(&x(1, 2));
    let m_vv = x(1, 2).cross(&x(0, 1)) + x(1, 1).cross(&x(0, 2)) * 2.0 + x(1, 0).cross(&x(0, 3));
    let md = [m_u, m_v];
    let mdd = [[m_uu, m_uv], [m_uv, m_vv]];

    // N = m s^{-1/2} with s = |m|².
    let s = m.dot(&m);
    let sd = [2.0 * m.dot(&m_u), 2.0 * m.dot(&m_v)];
    let mut sdd = [[0.0; 2]; 2];
    for i in 0..2 {
        for k in 0..2 {
            sdd[i][k] = 2.0 * (md[i].dot(&md[k]) + m.dot(&mdd[i][k]));
        }
    }
    let r1 = s.powf(-0.5);
    let r3 = r1 / s;
    let r5 = r3 / s;
    let n = m * r1;
    let d = [md[0] * r1 - m * (0.5 * r3 * sd[0]), md[1] * r1 - m * (0.5 * r3 * sd[1])];
    let mut dd = [[Vector3::zeros(); 2]; 2];
    for i in 0..2 {
        for k in 0..2 {
            dd[i][k] = mdd[i][k] * r1 - md[i] * (0.5 * r3 * sd[k]) - md[k] * (0.5 * r3 * sd[i])
                - m * (0.5 * r3 * sdd[i][k])
                + m * (0.75 * r5 * sd[i] * sd[k]);
        }
    }
    NormalJet { n, d, dd }
}

fn join(x: &Vector3<f64>, y: &Vector3<f64>) -> Vec6 {
    Vec6::new(x[0], x[1], x[2], y[0], y[1], y[2])
}

impl<'a> JetEvaluator<'a> {
    pub fn new(chart: &'a SurfaceChart) -> Self {
        JetEvaluator { chart }
    }

    pub fn chart(&self) -> &SurfaceChart {
        self.chart
    }

    pub fn vanishing_threshold(&self) -> f64 {
        VANISHING_H_REL / self.chart.diameter()
    }

    pub fn eval(&self, q: BundlePoint) -> Result<BundleJet> {
        let p = q.p;
        let t = q.t;
        let j = self.chart.jets(p);
        let nj = normal_jet(self.chart, p);
        let zero = Vector3::zeros();
        let f = join(&j.position(), &(nj.n * t));
        let df = [
            join(&j.d(1, 0), &(nj.d[0] * t)),
            join(&j.d(0, 1), &(nj.d[1] * t)),
            join(&zero, &nj.n),
        ];
        let xs = [[j.d(2, 0), j.d(1, 1)], [j.d(1, 1), j.d(0, 2)]];
        let mut ddf = [[Vec6::zeros(); 3]; 3];
        for i in 0..2 {
            for k in 0..2 {
                ddf[i][k] = join(&xs[i][k], &(nj.dd[i][k] * t));
            }
            ddf[i][2] = join(&zero, &nj.d[i]);
            ddf[2][i] = ddf[i][2];
        }
        let mut metric = Matrix3::zeros();
        for i in 0..3 {
            for k in 0..3 {
                metric[(i, k)] = df[i].dot(&df[k]);
            }
        }
        let det = metric.determinant();
        let scale = metric[(0, 0)] * metric[(1, 1)] * metric[(2, 2)];
        if !det.is_finite() || det <= DEGENERATE_REL * scale {
            return Err(Error::DegenerateMetric { det });
        }
        let metric_inv = metric.try_inverse().ok_or(Error::DegenerateMetric { det })?;
        Ok(BundleJet {
            f,
            df,
            ddf,
            metric,
            metric_inv,
        })
    }

    /// `H` at `q + s c`, coordinates `(u, v, t)`.
    fn mean_curvature_at(&self, q: BundlePoint, c: &Vector3<f64>, s: f64) -> Result<Vec6> {
        let shifted = BundlePoint {
            p: ChartPoint::new(q.p.u + s * c[0], q.p.v + s * c[1]),
            t: q.t + s * c[2],
        };
        Ok(self.eval(shifted)?.mean_curvature())
    }

    /// Central-difference derivative of the `H` field along the coordinate
    /// vector `c`.
    pub fn mean_curvature_derivative(&self, q: BundlePoint, c: &Vector3<f64>, step: f64) -> Result<Vec6> {
        let cmax = c.amax();
        if cmax == 0.0 {
            return Ok(Vec6::zeros());
        }
        let s = step / cmax;
        let plus = self.mean_curvature_at(q, c, s)?;
        let minus = self.mean_curvature_at(q, c, -s)?;
        Ok((plus - minus) / (2.0 * s))
    }
}

pub fn induced_metric(je: &JetEvaluator, q: BundlePoint) -> Result<Matrix3<f64>> {
    Ok(je.eval(q)?.metric())
}

pub fn mean_curvature_oracle(je: &JetEvaluator, q: BundlePoint) -> Result<Vec6> {
    Ok(je.eval(q)?.mean_curvature())
}

pub fn tangential_project(je: &JetEvaluator, q: BundlePoint, w: &Vec6) -> Result<Vec6> {
    Ok(je.eval(q)?.tangential_project(w))
}

/// Output of the brute-force Maslovian evaluation.
#[derive(Clone, Copy, Debug)]
pub struct OracleResiduals {
    /// `(F₁₂, F₁₃, F₂₃)`.
    pub f: [f64; 3],
    pub h: Vec6,
    /// `⟨JH(H), fẽᵢ⟩`.
    pub jhh_tangent: [f64; 3],
    /// `⟨JH, fẽᵢ⟩`.
    pub jh_inner: [f64; 3],
}

/// `F_ij` from the oracle `H`: differentiate the `H` field along `JH`,
/// read the result and `JH` in the supplied tangent frame.
pub fn maslov_residual_oracle(je: &JetEvaluator, q: BundlePoint, frames: &BundleFrames) -> Result<OracleResiduals> {
    maslov_residual_oracle_with_step(je, q, frames, FD_STEP)
}

pub fn maslov_residual_oracle_with_step(
    je: &JetEvaluator,
    q: BundlePoint,
    frames: &BundleFrames,
    step: f64,
) -> Result<OracleResiduals> {
    let bj = je.eval(q)?;
    let h = bj.mean_curvature();
    let norm = h.norm();
    if norm < je.vanishing_threshold() {
        return Err(Error::VanishingH { norm });
    }
    let jh = complex_structure(&h);
    let c = bj.tangent_coords(&jh);
    let d = je.mean_curvature_derivative(q, &c, step)?;
    let tan = frames.tangent_components(&d);
    let inner = frames.tangent_components(&jh);
    let wedge = |i: usize, j: usize| tan[i] * inner[j] - tan[j] * inner[i];
    Ok(OracleResiduals {
        f: [wedge(0, 1), wedge(0, 2), wedge(1, 2)],
        h,
        jhh_tangent: tan,
        jh_inner: inner,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle;
    use crate::surface::{catalog_surface, principal_frame_with, UmbilicPolicy};
    use approx::assert_relative_eq;
    use std::collections::BTreeMap;
    use std::f64::consts::PI;

    fn chart(name: &str) -> SurfaceChart {
        catalog_surface(name, &BTreeMap::new()).unwrap()
    }

    fn bp(u: f64, v: f64, t: f64) -> BundlePoint {
        BundlePoint {
            p: ChartPoint::new(u, v),
            t,
        }
    }

    #[test]
    fn normal_jet_matches_taylor_route() {
        let c = chart("torus");
        let p = ChartPoint::new(0.4, 1.3);
        let nj = normal_jet(&c, p);
        let h = 1e-5;
        let n_at = |u: f64, v: f64| normal_jet(&c, ChartPoint::new(u, v)).n;
        let fd_u = (n_at(p.u + h, p.v) - n_at(p.u - h, p.v)) / (2.0 * h);
        assert!((fd_u - nj.d[0]).norm() < 1e-8);
        let fd_uv = (normal_jet(&c, ChartPoint::new(p.u, p.v + h)).d[0]
            - normal_jet(&c, ChartPoint::new(p.u, p.v - h)).d[0])
            / (2.0 * h);
        assert!((fd_uv - nj.dd[0][1]).norm() < 1e-8);
    }

    #[test]
    fn plane_bundle_is_flat() {
        let c = chart("plane");
        let je = JetEvaluator::new(&c);
        let q = bp(0.2, -0.3, 1.5);
        assert_relative_eq!(induced_metric(&je, q).unwrap(), Matrix3::identity(), epsilon = 1e-15);
        assert_eq!(mean_curvature_oracle(&je, q).unwrap(), Vec6::zeros());
    }

    #[test]
    fn unit_sphere_zero_section_has_trace_two() {
        let c = chart("sphere");
        let je = JetEvaluator::new(&c);
        let h = mean_curvature_oracle(&je, bp(1.0, 0.7, 0.0)).unwrap();
        assert_relative_eq!(h.norm(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn sphere_metric_determinant_scales_with_frame_factors() {
        let c = chart("sphere");
        let je = JetEvaluator::new(&c);
        let t = 0.5;
        let g = induced_metric(&je, bp(PI / 2.0, 0.0, t)).unwrap();
        // det g = 1 at the equator, a = b = −1.
        assert_relative_eq!(g.determinant(), (1.0 + t * t) * (1.0 + t * t), epsilon = 1e-13);
    }

    #[test]
    fn metric_is_identity_in_the_adapted_frame() {
        let c = chart("ellipsoid");
        let je = JetEvaluator::new(&c);
        let q = bp(0.9, 0.6, -1.2);
        let pd = principal_frame_with(&c, q.p, UmbilicPolicy::Reject).unwrap();
        let fr = bundle::frames(&pd, q.t);
        let bj = je.eval(q).unwrap();
        for i in 0..3 {
            // Tangent frame vectors lie in the tangent space...
            let proj = bj.tangential_project(&fr.tangent[i]);
            assert!((proj - fr.tangent[i]).norm() < 1e-12);
            // ...and the normal frame is orthogonal to it.
            assert!(bj.tangential_project(&fr.normal[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn projection_is_idempotent_and_symmetric() {
        let c = chart("torus");
        let je = JetEvaluator::new(&c);
        let bj = je.eval(bp(0.3, 2.0, 0.7)).unwrap();
        let w = Vec6::new(0.3, -1.2, 0.5, 2.0, 0.1, -0.7);
        let z = Vec6::new(-0.4, 0.2, 1.1, 0.0, 0.9, 0.3);
        let pw = bj.tangential_project(&w);
        assert!((bj.tangential_project(&pw) - pw).norm() < 1e-12);
        assert!((pw.dot(&z) - w.dot(&bj.tangential_project(&z))).abs() < 1e-12);
        let rest = w - pw;
        for k in 0..3 {
            assert!(rest.dot(&bj.df[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn cylinder_oracle_residuals_vanish() {
        let c = chart("cylinder");
        let je = JetEvaluator::new(&c);
        for &(u, v, t) in &[(0.3, 0.2, 0.5), (2.0, -0.4, -1.3), (4.0, 0.9, 2.0)] {
            let q = bp(u, v, t);
            let pd = principal_frame_with(&c, q.p, UmbilicPolicy::Reject).unwrap();
            let r = maslov_residual_oracle(&je, q, &bundle::frames(&pd, t)).unwrap();
            assert!(r.f.iter().all(|f| f.abs() < 1e-5), "{:?}", r.f);
        }
    }

    #[test]
    fn catenoid_reports_vanishing_h() {
        let c = chart("catenoid");
        let je = JetEvaluator::new(&c);
        let q = bp(0.3, 0.2, 0.5);
        let pd = principal_frame_with(&c, q.p, UmbilicPolicy::Reject).unwrap();
        assert!(matches!(
            maslov_residual_oracle(&je, q, &bundle::frames(&pd, q.t)),
            Err(Error::VanishingH { .. })
        ));
    }

    #[test]
    fn central_differences_converge_at_second_order() {
        // On the unit sphere H = (R N, 0) with R = 2a/(1 + t²a²), a = −1, so
        // ∂H/∂t = (R'(t) N, 0) exactly.
        let c = chart("sphere");
        let je = JetEvaluator::new(&c);
        let q = bp(1.1, 0.4, 0.6);
        let n = c.jets(q.p).d(1, 0).cross(&c.jets(q.p).d(0, 1)).normalize();
        let t = q.t;
        let dr = 4.0 * t / ((1.0 + t * t) * (1.0 + t * t));
        let exact = join(&(n * dr), &Vector3::zeros());
        let dir = Vector3::new(0.0, 0.0, 1.0);
        let err = |h: f64| (je.mean_curvature_derivative(q, &dir, h).unwrap() - exact).norm();
        let ratio = err(1e-2) / err(5e-3);
        assert!((ratio - 4.0).abs() < 0.1, "ratio {ratio}");
    }
}
