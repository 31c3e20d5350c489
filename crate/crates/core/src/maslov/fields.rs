//! Residuals that differentiate closed-form fields across neighbouring
//! bundle points: `A_{JH}H` and the divergence of `JH`.

use super::{maslov_coords, maslov_field, mean_curvature_closed, vanishing_threshold};
use crate::bundle::{self, BundlePoint};
use crate::error::{Error, Result};
use crate::oracle::{JetEvaluator, FD_STEP};
use crate::surface::{principal_frame_with, ChartPoint, PrincipalData, SurfaceChart, UmbilicPolicy};
use crate::Vec6;
use nalgebra::Vector3;

/// Treatment of points where `H` vanishes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroH {
    Reject,
    /// Evaluate anyway; with `JH = 0` the derivative is zero.
    Allow,
}

fn principal_at(chart: &SurfaceChart, p: ChartPoint) -> Result<PrincipalData> {
    principal_frame_with(chart, p, UmbilicPolicy::Fallback)
}

fn shifted(q: BundlePoint, c: &Vector3<f64>, s: f64) -> BundlePoint {
    BundlePoint {
        p: ChartPoint::new(q.p.u + s * c[0], q.p.v + s * c[1]),
        t: q.t + s * c[2],
    }
}

/// `|tan(D_{JH} H)|`: the tangential part of the derivative of the
/// closed-form `H` field along `JH`, by central differences in `(u, v, t)`.
/// This is `|A_H(JH)|`.
pub fn ajh_h_residual(chart: &SurfaceChart, pd: &PrincipalData, t: f64, zero_h: ZeroH) -> Result<f64> {
    let h_norm = mean_curvature_closed(pd, t).norm();
    if zero_h == ZeroH::Reject && h_norm < vanishing_threshold(pd) {
        return Err(Error::VanishingH { norm: h_norm });
    }
    let c = maslov_coords(pd, t);
    let cmax = c.amax();
    if cmax == 0.0 {
        return Ok(0.0);
    }
    let s = FD_STEP / cmax;
    let q = BundlePoint { p: pd.point, t };
    let h_at = |sign: f64| -> Result<Vec6> {
        let qq = shifted(q, &c, sign * s);
        Ok(mean_curvature_closed(&principal_at(chart, qq.p)?, qq.t))
    };
    let d = (h_at(1.0)? - h_at(-1.0)?) / (2.0 * s);
    let tan = bundle::frames(pd, t).tangent_components(&d);
    Ok((tan[0] * tan[0] + tan[1] * tan[1] + tan[2] * tan[2]).sqrt())
}

/// `div(JH) = G^{ij}(∂ᵢωⱼ − Γᵏᵢⱼ ωₖ)` with `ωⱼ = ⟨JH, ∂ⱼf⟩`, metric and
/// Christoffel symbols from the oracle, `∂ᵢωⱼ` by central differences.
pub fn maslov_divergence(chart: &SurfaceChart, pd: &PrincipalData, t: f64) -> Result<f64> {
    let je = JetEvaluator::new(chart);
    let q = BundlePoint { p: pd.point, t };
    let lowered = |qq: BundlePoint, pdq: &PrincipalData| -> Result<Vector3<f64>> {
        let bj = je.eval(qq)?;
        let jh = maslov_field(pdq, qq.t);
        Ok(Vector3::new(jh.dot(&bj.df[0]), jh.dot(&bj.df[1]), jh.dot(&bj.df[2])))
    };
    let bj = je.eval(q)?;
    let omega = lowered(q, pd)?;
    let h = FD_STEP;
    let mut domega = [Vector3::zeros(); 3];
    for (i, di) in domega.iter_mut().enumerate() {
        let mut unit = Vector3::zeros();
        unit[i] = 1.0;
        let plus = shifted(q, &unit, h);
        let minus = shifted(q, &unit, -h);
        let (pp, pm) = if i == 2 {
            (*pd, *pd)
        } else {
            (principal_at(chart, plus.p)?, principal_at(chart, minus.p)?)
        };
        *di = (lowered(plus, &pp)? - lowered(minus, &pm)?) / (2.0 * h);
    }
    let gamma = bj.christoffel();
    let ginv = bj.metric_inverse();
    let mut div = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let conn: f64 = (0..3).map(|k| gamma[k][(i, j)] * omega[k]).sum();
            div += ginv[(i, j)] * (domega[i][j] - conn);
        }
    }
    Ok(div)
}

/// `|div(JH)|`; zero exactly when the Maslov form is co-closed.
pub fn hamiltonian_residual(chart: &SurfaceChart, pd: &PrincipalData, t: f64) -> Result<f64> {
    Ok(maslov_divergence(chart, pd, t)?.abs())
}
