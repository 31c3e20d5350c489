//! Closed-form curvature invariants of `T⊥M ⊂ C³`.
//!
//! With `α = 1 + t²a²` and `β = 1 + t²b²`:
//!
//! ```text
//! P = α⁻² e₁a + α⁻¹β⁻¹ e₁b
//! Q = α⁻¹β⁻¹ e₂a + β⁻² e₂b
//! R = a α⁻¹ + b β⁻¹
//! H  = −(P t² a e₁ + Q t² b e₂ − R N,  P t e₁ + Q t e₂)
//! JH = t P e₁ + t Q e₂ + R ∂/∂t
//! ```
//!
//! The bundle is Maslovian when `A_H(JH) ∥ JH`, i.e. when
//! `F_ij = ⟨JH(H), fẽᵢ⟩⟨JH, ẽⱼ⟩ − ⟨JH(H), fẽⱼ⟩⟨JH, ẽᵢ⟩` vanish for
//! `(i, j) ∈ {(1,2), (1,3), (2,3)}`.
//!
//! Every expression below enters `t` only through products, so negating
//! `t` negates each odd quantity bit for bit.

mod fields;
mod identities;

pub use fields::{ajh_h_residual, hamiltonian_residual, maslov_divergence, ZeroH};
pub use identities::{
    closed_f3_g3, identity_coeffs, identity_coeffs_closed, identity_coeffs_extracted, phi_psi, relative_error,
    ClosedCoeffs, IdentityCoeffs, IdentityInputs, DEFAULT_T_SAMPLES, MAX_VANDERMONDE_COND,
};

use crate::bundle::{self, join};
use crate::error::{Error, Result};
use crate::surface::PrincipalData;
use crate::Vec6;
use nalgebra::Vector3;

/// `|H|` below which the Maslovian test is vacuous, per unit of `1/diam`.
pub const VANISHING_H_REL: f64 = 1e-9;

/// Weight of the natural scale `|H|³·max(|a|,|b|,1/diam)` in the
/// denominator of the cancellation-relative residual.
pub const FHAT_SCALE_REL: f64 = 1e-6;

/// Absolute floor of the cancellation-relative denominator.
pub const FHAT_FLOOR: f64 = 1e-300;

/// Index pairs of `(F₁₂, F₁₃, F₂₃)`.
pub const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

pub fn vanishing_threshold(pd: &PrincipalData) -> f64 {
    VANISHING_H_REL / pd.length_scale
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pqr {
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

pub(crate) fn pqr_raw(a: f64, b: f64, e1a: f64, e1b: f64, e2a: f64, e2b: f64, t: f64) -> Pqr {
    let ia = 1.0 / (1.0 + t * t * a * a);
    let ib = 1.0 / (1.0 + t * t * b * b);
    Pqr {
        p: ia * ia * e1a + ia * ib * e1b,
        q: ia * ib * e2a + ib * ib * e2b,
        r: a * ia + b * ib,
    }
}

pub fn pqr(pd: &PrincipalData, t: f64) -> Pqr {
    pqr_raw(pd.a, pd.b, pd.e1a, pd.e1b, pd.e2a, pd.e2b, t)
}

/// Diagonal components `h^α_ii` of the second fundamental form in the
/// adapted frames, `α = 4, 5, 6`, `i = 1, 2, 3`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SecondFundamentalDiag {
    pub h4: [f64; 3],
    pub h5: [f64; 3],
    pub h6: [f64; 3],
}

impl SecondFundamentalDiag {
    pub fn traces(&self) -> [f64; 3] {
        [self.h4.iter().sum(), self.h5.iter().sum(), self.h6.iter().sum()]
    }
}

pub fn second_fundamental_diag(pd: &PrincipalData, t: f64) -> SecondFundamentalDiag {
    let alpha = 1.0 + t * t * pd.a * pd.a;
    let beta = 1.0 + t * t * pd.b * pd.b;
    let (sa, sb) = (alpha.sqrt(), beta.sqrt());
    SecondFundamentalDiag {
        h4: [-t * pd.e1a / (alpha * sa), -t * pd.e1b / (sa * beta), 0.0],
        h5: [-t * pd.e2a / (alpha * sb), -t * pd.e2b / (beta * sb), 0.0],
        h6: [-pd.a / alpha, -pd.b / beta, 0.0],
    }
}

/// The mean curvature vector `H = trace h` in ambient `R⁶` coordinates.
pub fn mean_curvature_closed(pd: &PrincipalData, t: f64) -> Vec6 {
    let Pqr { p, q, r } = pqr(pd, t);
    let t2 = t * t;
    let first = -(pd.e1 * (p * t2 * pd.a) + pd.e2 * (q * t2 * pd.b) - pd.normal * r);
    let second = -(pd.e1 * (p * t) + pd.e2 * (q * t));
    join(&first, &second)
}

/// `H` with the sign of its `(N, 0)` component reversed, as produced by a
/// sign slip on the `R N` term. Used as a negative control.
pub fn sign_slipped_h(pd: &PrincipalData, t: f64) -> Vec6 {
    let h = mean_curvature_closed(pd, t);
    let n = join(&pd.normal, &Vector3::zeros());
    h - n * (2.0 * h.dot(&n))
}

/// Components `(tP, tQ, R)` of `JH` along the lifted fields `(e₁, e₂, ∂/∂t)`.
pub fn jh_components(pd: &PrincipalData, t: f64) -> [f64; 3] {
    let Pqr { p, q, r } = pqr(pd, t);
    [t * p, t * q, r]
}

/// `f_*(JH) = tP f_*(e₁) + tQ f_*(e₂) + R (0, N)` in `R⁶`.
pub fn maslov_field(pd: &PrincipalData, t: f64) -> Vec6 {
    let [c1, c2, c3] = jh_components(pd, t);
    let [l1, l2] = bundle::horizontal_pushforwards(pd, t);
    l1 * c1 + l2 * c2 + join(&Vector3::zeros(), &pd.normal) * c3
}

/// Chart-coordinate components of `JH` in `(u, v, t)`.
pub fn maslov_coords(pd: &PrincipalData, t: f64) -> Vector3<f64> {
    let [c1, c2, c3] = jh_components(pd, t);
    let uv = pd.e1_coords * c1 + pd.e2_coords * c2;
    Vector3::new(uv[0], uv[1], c3)
}

/// `⟨JH, ẽᵢ⟩` for `i = 1, 2, 3`.
pub fn jh_inner(pd: &PrincipalData, t: f64) -> [f64; 3] {
    let alpha = 1.0 + t * t * pd.a * pd.a;
    let beta = 1.0 + t * t * pd.b * pd.b;
    let (sa, sb) = (alpha.sqrt(), beta.sqrt());
    [
        t * (pd.e1a / (alpha * sa) + pd.e1b / (sa * beta)),
        t * (pd.e2a / (alpha * sb) + pd.e2b / (beta * sb)),
        pd.a / alpha + pd.b / beta,
    ]
}

/// `⟨JH(H), f_*(ẽᵢ)⟩` for `i = 1, 2, 3`, in the form reduced by the
/// Codazzi equations.
pub fn jhh_tangent(pd: &PrincipalData, t: f64) -> [f64; 3] {
    let Pqr { p, q, r } = pqr(pd, t);
    let (a, b) = (pd.a, pd.b);
    let t2 = t * t;
    let t3 = t2 * t;
    let sa = (1.0 + t2 * a * a).sqrt();
    let sb = (1.0 + t2 * b * b).sqrt();
    [
        (-t3 * p * p * pd.e1a - 2.0 * t3 * p * q * pd.e2a - t3 * q * q * pd.e1b - 2.0 * t * p * r * a) / sa,
        (-t3 * p * p * pd.e2a - 2.0 * t3 * p * q * pd.e1b - t3 * q * q * pd.e2b - 2.0 * t * r * q * b) / sb,
        -t2 * p * p * a - t2 * q * q * b,
    ]
}

/// Derivatives of `P, Q, R` along the lifted `e₁`, `e₂` and along `t`.
/// They enter the unreduced expansion of `JH(H)` but cancel in its
/// tangential part.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct HFieldDerivatives {
    pub e1p: f64,
    pub e2p: f64,
    pub dp_dt: f64,
    pub e1q: f64,
    pub e2q: f64,
    pub dq_dt: f64,
    pub e1r: f64,
    pub e2r: f64,
    pub dr_dt: f64,
}

/// The full derivative `JH(H)` of the `H` field along `JH`, expanded with
/// the Gauss–Weingarten formulas of `M` before any cancellation. Needs the
/// connection coefficients, so it is undefined at umbilics.
pub fn jhh_vector_expanded(pd: &PrincipalData, t: f64, d: &HFieldDerivatives) -> Vec6 {
    let Pqr { p, q, r } = pqr(pd, t);
    let (a, b) = (pd.a, pd.b);
    let (e1, e2, n) = (pd.e1, pd.e2, pd.normal);
    let w12_1 = pd.omega12_e1;
    let w12_2 = pd.omega12_e2;
    let (w21_1, w21_2) = (-w12_1, -w12_2);
    let t2 = t * t;

    let x_along_e1 = -e1 * (d.e1p * t2 * a) - e1 * (p * t2 * pd.e1a) - (e2 * w12_1 + n * a) * (p * t2 * a)
        - e2 * (d.e1q * t2 * b)
        - e2 * (q * t2 * pd.e1b)
        - e1 * (q * t2 * b * w21_1)
        + n * d.e1r
        - e1 * (a * r);
    let x_along_e2 = -e1 * (d.e2p * t2 * a) - e1 * (p * t2 * pd.e2a) - e2 * (p * t2 * a * w12_2)
        - e2 * (d.e2q * t2 * b)
        - e2 * (q * t2 * pd.e2b)
        - (e1 * w21_2 + n * b) * (q * t2 * b)
        + n * d.e2r
        - e2 * (b * r);
    let x_along_t = -e1 * (d.dp_dt * t2 * a) - e1 * (2.0 * t * p * a) - e2 * (d.dq_dt * t2 * b) - e2 * (2.0 * t * q * b)
        + n * d.dr_dt;

    let y_along_e1 = -e1 * (d.e1p * t) - (e2 * w12_1 + n * a) * (p * t) - e2 * (d.e1q * t) - e1 * (q * t * w21_1);
    let y_along_e2 = -e1 * (d.e2p * t) - e2 * (p * t * w12_2) - e2 * (d.e2q * t) - (e1 * w21_2 + n * b) * (q * t);
    let y_along_t = -e1 * (d.dp_dt * t) - e1 * p - e2 * (d.dq_dt * t) - e2 * q;

    let (c1, c2) = (t * p, t * q);
    join(
        &(x_along_e1 * c1 + x_along_e2 * c2 + x_along_t * r),
        &(y_along_e1 * c1 + y_along_e2 * c2 + y_along_t * r),
    )
}

/// Maslovian residuals at one bundle point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaslovResiduals {
    /// `(F₁₂, F₁₃, F₂₃)`.
    pub f: [f64; 3],
    /// Cancellation-relative `F̂ᵢⱼ`.
    pub fhat: [f64; 3],
}

impl MaslovResiduals {
    pub fn fhat_max(&self) -> f64 {
        self.fhat.iter().copied().fold(0.0, f64::max)
    }
}

/// Assembles `F_ij` and `F̂_ij` from the two triples of inner products.
///
/// `F̂ᵢⱼ = |Fᵢⱼ| / (|TᵢVⱼ| + |TⱼVᵢ| + ε)` with
/// `ε = 1e-300 + 1e-6·|H|³·κ`, `κ = max(|a|, |b|, 1/diam)`.
pub fn residuals_from_parts(tangent: &[f64; 3], inner: &[f64; 3], h_norm: f64, curvature_scale: f64) -> MaslovResiduals {
    let floor = FHAT_FLOOR + FHAT_SCALE_REL * h_norm * h_norm * h_norm * curvature_scale;
    let mut f = [0.0; 3];
    let mut fhat = [0.0; 3];
    for (k, &(i, j)) in PAIRS.iter().enumerate() {
        let lhs = tangent[i] * inner[j];
        let rhs = tangent[j] * inner[i];
        f[k] = lhs - rhs;
        fhat[k] = f[k].abs() / (lhs.abs() + rhs.abs() + floor);
    }
    MaslovResiduals { f, fhat }
}

pub fn maslov_residuals(pd: &PrincipalData, t: f64) -> Result<MaslovResiduals> {
    let h_norm = mean_curvature_closed(pd, t).norm();
    if h_norm < vanishing_threshold(pd) {
        return Err(Error::VanishingH { norm: h_norm });
    }
    Ok(residuals_from_parts(
        &jhh_tangent(pd, t),
        &jh_inner(pd, t),
        h_norm,
        pd.curvature_scale(),
    ))
}

/// Everything the closed-form path computes at a bundle point.
#[derive(Clone, Copy, Debug)]
pub struct MaslovData {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub h: Vec6,
    /// `(tP, tQ, R)`.
    pub jh_comp: [f64; 3],
    pub jhh_tan: [f64; 3],
    pub jh_inner: [f64; 3],
    /// `None` where `|H|` vanishes.
    pub residuals: Option<MaslovResiduals>,
}

pub fn maslov_data(pd: &PrincipalData, t: f64) -> MaslovData {
    let Pqr { p, q, r } = pqr(pd, t);
    MaslovData {
        p,
        q,
        r,
        h: mean_curvature_closed(pd, t),
        jh_comp: jh_components(pd, t),
        jhh_tan: jhh_tangent(pd, t),
        jh_inner: jh_inner(pd, t),
        residuals: maslov_residuals(pd, t).ok(),
    }
}

#[cfg(test)]
mod tests;
