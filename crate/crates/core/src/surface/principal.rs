//! Fundamental forms, shape operator and the principal frame with its
//! first-order derivatives.

use super::{ChartPoint, SurfaceChart};
use crate::error::{Error, Result};
use crate::jet::{cross3, d_u3, d_v3, dot3, Jet};
use nalgebra::{Matrix2, Vector2, Vector3};

/// Relative threshold on `det g / (g₁₁ g₂₂)` below which the chart is
/// treated as singular.
const DEGENERATE_REL: f64 = 1e-12;

/// Relative gap `|a − b| / max(|a|, |b|, 1/diam)` below which a point is umbilic.
pub const UMBILIC_REL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FundamentalForms {
    /// First fundamental form in the chart basis.
    pub g: Matrix2<f64>,
    /// Second fundamental form with respect to `normal`.
    pub hn: Matrix2<f64>,
    pub normal: Vector3<f64>,
}

impl FundamentalForms {
    /// `A = g⁻¹ hN`.
    pub fn shape_operator(&self) -> Matrix2<f64> {
        inverse2(&self.g) * self.hn
    }
}

/// The shape operator and the data needed to differentiate it at one point.
#[derive(Clone, Copy, Debug)]
pub struct ShapeOperatorJet {
    pub point: ChartPoint,
    pub x: Vector3<f64>,
    pub x_u: Vector3<f64>,
    pub x_v: Vector3<f64>,
    pub x_uu: Vector3<f64>,
    pub x_uv: Vector3<f64>,
    pub x_vv: Vector3<f64>,
    pub forms: FundamentalForms,
    pub a: Matrix2<f64>,
    pub a_u: Matrix2<f64>,
    pub a_v: Matrix2<f64>,
}

impl ShapeOperatorJet {
    /// Directional derivative of `A` along the chart vector `w`.
    pub fn derivative(&self, w: &Vector2<f64>) -> Matrix2<f64> {
        self.a_u * w[0] + self.a_v * w[1]
    }
}

fn inverse2(m: &Matrix2<f64>) -> Matrix2<f64> {
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    Matrix2::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]) / det
}

fn vec3(j: &[Jet; 3]) -> Vector3<f64> {
    Vector3::new(j[0].value(), j[1].value(), j[2].value())
}

fn check_metric(g: &Matrix2<f64>) -> Result<()> {
    let det = g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)];
    let scale = g[(0, 0)] * g[(1, 1)];
    if !(det.is_finite() && scale.is_finite()) || det <= DEGENERATE_REL * scale || scale <= 0.0 {
        return Err(Error::DegenerateMetric { det });
    }
    Ok(())
}

/// First and second fundamental forms and the unit normal at `p`.
pub fn fundamental_forms(chart: &SurfaceChart, p: ChartPoint) -> Result<FundamentalForms> {
    let j = chart.jets(p);
    let (xu, xv) = (j.d(1, 0), j.d(0, 1));
    let g = Matrix2::new(xu.dot(&xu), xu.dot(&xv), xv.dot(&xu), xv.dot(&xv));
    check_metric(&g)?;
    let normal = xu.cross(&xv).normalize();
    let (huu, huv, hvv) = (j.d(2, 0).dot(&normal), j.d(1, 1).dot(&normal), j.d(0, 2).dot(&normal));
    Ok(FundamentalForms {
        g,
        hn: Matrix2::new(huu, huv, huv, hvv),
        normal,
    })
}

/// Shape operator with its first partial derivatives, propagated through
/// the unit normal from the order-3 chart jets.
pub fn shape_operator_jet(chart: &SurfaceChart, p: ChartPoint) -> Result<ShapeOperatorJet> {
    let x = chart.jet_at(p);
    let xu = d_u3(&x);
    let xv = d_v3(&x);
    let xuu = d_u3(&xu);
    let xuv = d_v3(&xu);
    let xvv = d_v3(&xv);
    let n = cross3(&xu, &xv);
    let inv_len = dot3(&n, &n).sqrt().recip();
    let normal = [n[0] * inv_len, n[1] * inv_len, n[2] * inv_len];

    let g11 = dot3(&xu, &xu);
    let g12 = dot3(&xu, &xv);
    let g22 = dot3(&xv, &xv);
    let h11 = dot3(&xuu, &normal);
    let h12 = dot3(&xuv, &normal);
    let h22 = dot3(&xvv, &normal);

    let g = Matrix2::new(g11.value(), g12.value(), g12.value(), g22.value());
    check_metric(&g)?;

    let inv_det = (g11 * g22 - g12 * g12).recip();
    // A = g⁻¹ hN on jets.
    let a11 = (g22 * h11 - g12 * h12) * inv_det;
    let a12 = (g22 * h12 - g12 * h22) * inv_det;
    let a21 = (g11 * h12 - g12 * h11) * inv_det;
    let a22 = (g11 * h22 - g12 * h12) * inv_det;
    let at = |i: usize, j: usize| {
        Matrix2::new(a11.partial(i, j), a12.partial(i, j), a21.partial(i, j), a22.partial(i, j))
    };

    Ok(ShapeOperatorJet {
        point: p,
        x: vec3(&x),
        x_u: vec3(&xu),
        x_v: vec3(&xv),
        x_uu: vec3(&xuu),
        x_uv: vec3(&xuv),
        x_vv: vec3(&xvv),
        forms: FundamentalForms {
            g,
            hn: Matrix2::new(h11.value(), h12.value(), h12.value(), h22.value()),
            normal: vec3(&normal),
        },
        a: at(0, 0),
        a_u: at(1, 0),
        a_v: at(0, 1),
    })
}

/// Pointwise principal data consumed by the closed-form bundle formulas.
#[derive(Clone, Copy, Debug)]
pub struct PrincipalData {
    pub point: ChartPoint,
    pub x: Vector3<f64>,
    pub normal: Vector3<f64>,
    /// Principal curvatures, `a ≤ b`.
    pub a: f64,
    pub b: f64,
    pub e1: Vector3<f64>,
    pub e2: Vector3<f64>,
    /// Chart components of `e1`, `e2`.
    pub e1_coords: Vector2<f64>,
    pub e2_coords: Vector2<f64>,
    /// `ω₁²(e₁)`, `ω₁²(e₂)` with `ω₁²(X) = ⟨∇_X e₁, e₂⟩`. NaN at umbilics.
    pub omega12_e1: f64,
    pub omega12_e2: f64,
    pub e1a: f64,
    pub e1b: f64,
    pub e2a: f64,
    pub e2b: f64,
    pub umbilic: bool,
    /// Chart diameter, used to scale thresholds.
    pub length_scale: f64,
}

impl PrincipalData {
    /// `max(|a|, |b|, 1/diam)`.
    pub fn curvature_scale(&self) -> f64 {
        self.a.abs().max(self.b.abs()).max(1.0 / self.length_scale)
    }

    /// Same point seen with the opposite unit normal: curvatures and
    /// their derivatives change sign, the order `a ≤ b` is restored by
    /// exchanging the two principal directions, and `e₂ = N × e₁` is kept.
    pub fn with_flipped_normal(&self) -> Self {
        PrincipalData {
            normal: -self.normal,
            a: -self.b,
            b: -self.a,
            e1: self.e2,
            e2: self.e1,
            e1_coords: self.e2_coords,
            e2_coords: self.e1_coords,
            // ω₁²' (X) = ⟨∇_X e₂, e₁⟩ = −ω₁²(X).
            omega12_e1: -self.omega12_e2,
            omega12_e2: -self.omega12_e1,
            e1a: -self.e2b,
            e1b: -self.e2a,
            e2a: -self.e1b,
            e2b: -self.e1a,
            ..*self
        }
    }
}

/// How [`principal_frame_with`] treats umbilic points.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UmbilicPolicy {
    /// Fail with [`Error::UmbilicPoint`].
    Reject,
    /// Return an arbitrary orthonormal frame with `a = b = tr A / 2`,
    /// `eᵢa = eᵢb = eᵢ(tr A / 2)` and NaN connection coefficients.
    Fallback,
}

/// Principal frame at `p`; umbilic points are rejected.
pub fn principal_frame(chart: &SurfaceChart, p: ChartPoint) -> Result<PrincipalData> {
    principal_frame_with(chart, p, UmbilicPolicy::Reject)
}

/// `⟨X c, d⟩_g`.
#[inline]
fn gform(g: &Matrix2<f64>, x: &Matrix2<f64>, c: &Vector2<f64>, d: &Vector2<f64>) -> f64 {
    d.dot(&(g * (x * c)))
}

pub fn principal_frame_with(chart: &SurfaceChart, p: ChartPoint, policy: UmbilicPolicy) -> Result<PrincipalData> {
    let sj = shape_operator_jet(chart, p)?;
    let g = sj.forms.g;
    let hn = sj.forms.hn;
    let normal = sj.forms.normal;
    let length_scale = chart.diameter();

    // hN c = λ g c via g = L Lᵀ and S = L⁻¹ hN L⁻ᵀ.
    let l11 = g[(0, 0)].sqrt();
    let l21 = g[(1, 0)] / l11;
    let l22 = (g[(1, 1)] - l21 * l21).sqrt();
    let linv = Matrix2::new(1.0 / l11, 0.0, -l21 / (l11 * l22), 1.0 / l22);
    let s = linv * hn * linv.transpose();
    let (sp, sq, sr) = (s[(0, 0)], 0.5 * (s[(0, 1)] + s[(1, 0)]), s[(1, 1)]);
    let mean = 0.5 * (sp + sr);
    let half_gap = (0.25 * (sp - sr) * (sp - sr) + sq * sq).sqrt();
    let (a, b) = (mean - half_gap, mean + half_gap);

    let scale = a.abs().max(b.abs()).max(1.0 / length_scale);
    let threshold = UMBILIC_REL * scale;
    let umbilic = b - a < threshold;

    let ginv = inverse2(&g);
    let ambient = |c: &Vector2<f64>| sj.x_u * c[0] + sj.x_v * c[1];
    let coords = |e: &Vector3<f64>| ginv * Vector2::new(e.dot(&sj.x_u), e.dot(&sj.x_v));

    if umbilic {
        if policy == UmbilicPolicy::Reject {
            return Err(Error::UmbilicPoint { gap: b - a, threshold });
        }
        let c1 = Vector2::new(1.0 / sj.x_u.norm(), 0.0);
        let e1 = ambient(&c1);
        let e2 = normal.cross(&e1);
        let c2 = coords(&e2);
        let dmean = |w: &Vector2<f64>| 0.5 * sj.derivative(w).trace();
        let (d1, d2) = (dmean(&c1), dmean(&c2));
        return Ok(PrincipalData {
            point: p,
            x: sj.x,
            normal,
            a: mean,
            b: mean,
            e1,
            e2,
            e1_coords: c1,
            e2_coords: c2,
            omega12_e1: f64::NAN,
            omega12_e2: f64::NAN,
            e1a: d1,
            e1b: d1,
            e2a: d2,
            e2b: d2,
            umbilic: true,
            length_scale,
        });
    }

    // Unit eigenvector of S for the smaller eigenvalue, pulled back to chart components.
    let phi = 0.5 * (2.0 * sq).atan2(sp - sr);
    let y1 = Vector2::new(-phi.sin(), phi.cos());
    let mut c1 = linv.transpose() * y1;
    let mut e1 = ambient(&c1);
    let reference = if e1.dot(&sj.x_u).abs() > 1e-12 * sj.x_u.norm() {
        e1.dot(&sj.x_u)
    } else {
        e1.dot(&sj.x_v)
    };
    if reference < 0.0 {
        c1 = -c1;
        e1 = -e1;
    }
    let e2 = normal.cross(&e1);
    let c2 = coords(&e2);

    let da1 = sj.derivative(&c1);
    let da2 = sj.derivative(&c2);
    let e1a = gform(&g, &da1, &c1, &c1);
    let e1b = gform(&g, &da1, &c2, &c2);
    let e2a = gform(&g, &da2, &c1, &c1);
    let e2b = gform(&g, &da2, &c2, &c2);

    // ω₁²(w) = ⟨D_w(c₁ᵏ ∂ₖx), e₂⟩: eigenvector perturbation plus the
    // second-derivative (Christoffel) part of the chart.
    let omega = |w: &Vector2<f64>, da: &Matrix2<f64>| {
        let rotation = gform(&g, da, &c1, &c2) / (a - b);
        let second = sj.x_uu * (c1[0] * w[0]) + sj.x_uv * (c1[0] * w[1] + c1[1] * w[0]) + sj.x_vv * (c1[1] * w[1]);
        rotation + second.dot(&e2)
    };

    Ok(PrincipalData {
        point: p,
        x: sj.x,
        normal,
        a,
        b,
        e1,
        e2,
        e1_coords: c1,
        e2_coords: c2,
        omega12_e1: omega(&c1, &da1),
        omega12_e2: omega(&c2, &da2),
        e1a,
        e1b,
        e2a,
        e2b,
        umbilic: false,
        length_scale,
    })
}

/// Codazzi consistency residuals
/// `r₁ = e₁b − (a − b) ω₁²(e₂)`, `r₂ = e₂a − (b − a) ω₂¹(e₁)` with `ω₂¹ = −ω₁²`.
pub fn codazzi_residual(pd: &PrincipalData) -> (f64, f64) {
    let r1 = pd.e1b - (pd.a - pd.b) * pd.omega12_e2;
    let r2 = pd.e2a - (pd.b - pd.a) * (-pd.omega12_e1);
    (r1, r2)
}
