//! Polynomial identities behind `F₁₃` and `F₂₃`.
//!
//! Up to the positive factor `(1+t²a²)^{-1/2}`, `F₁₃ = φ₁t³ + φ₂t`, and
//! likewise `F₂₃ = (1+t²b²)^{-1/2}(ψ₁t³ + ψ₂t)`. Clearing denominators with
//! `(1+t²a²)⁴(1+t²b²)⁴` gives odd polynomials of degree 9 in `t` whose
//! low-order coefficients have short closed forms.

use super::{pqr_raw, Pqr};
use crate::error::{Error, Result};
use nalgebra::{SMatrix, SVector};

/// Default sample abscissae for the coefficient solve.
pub const DEFAULT_T_SAMPLES: [f64; 5] = [0.15, 0.3, 0.45, 0.6, 0.75];

/// Largest accepted 2-norm condition number of the Vandermonde system.
pub const MAX_VANDERMONDE_COND: f64 = 1e12;

/// Scale-relative tolerance on the constraint `e₁a+e₁b = e₂a+e₂b = 0`.
const CONSTRAINT_REL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct IdentityInputs {
    pub a: f64,
    pub b: f64,
    pub e1a: f64,
    pub e1b: f64,
    pub e2a: f64,
    pub e2b: f64,
}

impl IdentityInputs {
    pub fn from_array(x: [f64; 6]) -> Self {
        IdentityInputs { a: x[0], b: x[1], e1a: x[2], e1b: x[3], e2a: x[4], e2b: x[5] }
    }

    /// The same inputs with `e₁b = −e₁a` and `e₂b = −e₂a` imposed.
    pub fn constrained(self) -> Self {
        IdentityInputs { e1b: -self.e1a, e2b: -self.e2a, ..self }
    }

    fn pqr(&self, t: f64) -> Pqr {
        pqr_raw(self.a, self.b, self.e1a, self.e1b, self.e2a, self.e2b, t)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ClosedCoeffs {
    pub f1: f64,
    pub g1: f64,
    /// `None` unless the inputs satisfy the constraint.
    pub f3: Option<f64>,
    pub g3: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct IdentityCoeffs {
    pub f1: f64,
    pub g1: f64,
    pub f3: Option<f64>,
    pub g3: Option<f64>,
    /// Coefficients of `t¹, t³, t⁵, t⁷, t⁹` on the `φ` side.
    pub extracted_f: [f64; 5],
    /// Same for the `ψ` side.
    pub extracted_g: [f64; 5],
    pub condition: f64,
}

/// `(φ₁, φ₂, ψ₁, ψ₂)` at fibre coordinate `t`.
pub fn phi_psi(x: &IdentityInputs, t: f64) -> [f64; 4] {
    let Pqr { p, q, r } = x.pqr(t);
    let (a, b) = (x.a, x.b);
    let ia = 1.0 / (1.0 + t * t * a * a);
    let ib = 1.0 / (1.0 + t * t * b * b);
    let phi1 = -2.0 * p * q * r * x.e2a + ia * q * q * (b * x.e1a - a * x.e1b) + ib * p * p * (a * x.e1b - b * x.e1a);
    let phi2 = -2.0 * a * p * r * r;
    let psi1 = -2.0 * p * q * r * x.e1b + ia * q * q * (b * x.e2a - a * x.e2b) + ib * p * p * (a * x.e2b - b * x.e2a);
    let psi2 = -2.0 * b * q * r * r;
    [phi1, phi2, psi1, psi2]
}

/// `f₁`, `g₁` always; `f₃`, `g₃` only under the constraint.
pub fn identity_coeffs_closed(x: &IdentityInputs) -> ClosedCoeffs {
    let (a, b) = (x.a, x.b);
    let s = a + b;
    let f1 = -2.0 * a * s * s * (x.e1a + x.e1b);
    let g1 = -2.0 * b * s * s * (x.e2a + x.e2b);
    let (f3, g3) = match closed_f3_g3(x) {
        Ok((f3, g3)) => (Some(f3), Some(g3)),
        Err(_) => (None, None),
    };
    ClosedCoeffs { f1, g1, f3, g3 }
}

/// `f₃ = 2a(a−b)(a+b)³e₁a`, `g₃ = 2b(a−b)(a+b)³e₂a`.
pub fn closed_f3_g3(x: &IdentityInputs) -> Result<(f64, f64)> {
    let scale = [x.e1a, x.e1b, x.e2a, x.e2b].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let r1 = x.e1a + x.e1b;
    let r2 = x.e2a + x.e2b;
    if r1.abs() > CONSTRAINT_REL * scale || r2.abs() > CONSTRAINT_REL * scale {
        return Err(Error::ConstraintViolated { r1, r2 });
    }
    let (a, b) = (x.a, x.b);
    let cube = (a + b).powi(3);
    Ok((2.0 * a * (a - b) * cube * x.e1a, 2.0 * b * (a - b) * cube * x.e2a))
}

/// Odd-power coefficients of `(1+t²a²)⁴(1+t²b²)⁴(φ₁t³+φ₂t)` and of the
/// `ψ` analogue, by an exact-degree interpolation in `s = t²`.
pub fn identity_coeffs_extracted(x: &IdentityInputs, t_samples: &[f64; 5]) -> Result<([f64; 5], [f64; 5], f64)> {
    for (i, &t) in t_samples.iter().enumerate() {
        if !(t > 0.0 && t.is_finite()) || t_samples[..i].contains(&t) {
            return Err(Error::InvalidParams("t samples must be distinct and positive".into()));
        }
    }
    let mut v = SMatrix::<f64, 5, 5>::zeros();
    let mut rhs_f = SVector::<f64, 5>::zeros();
    let mut rhs_g = SVector::<f64, 5>::zeros();
    for (i, &t) in t_samples.iter().enumerate() {
        let s = t * t;
        for k in 0..5 {
            v[(i, k)] = s.powi(k as i32);
        }
        let clear = ((1.0 + s * x.a * x.a) * (1.0 + s * x.b * x.b)).powi(4);
        let [phi1, phi2, psi1, psi2] = phi_psi(x, t);
        // G(t)/t
        rhs_f[i] = clear * (phi1 * s + phi2);
        rhs_g[i] = clear * (psi1 * s + psi2);
    }
    let sv = v.singular_values();
    let cond = sv.max() / sv.min();
    if !(cond <= MAX_VANDERMONDE_COND) {
        return Err(Error::IllConditioned { cond });
    }
    let lu = v.lu();
    let cf = lu.solve(&rhs_f).ok_or(Error::IllConditioned { cond: f64::INFINITY })?;
    let cg = lu.solve(&rhs_g).ok_or(Error::IllConditioned { cond: f64::INFINITY })?;
    Ok((cf.into(), cg.into(), cond))
}

pub fn identity_coeffs(x: &IdentityInputs, t_samples: &[f64; 5]) -> Result<IdentityCoeffs> {
    let closed = identity_coeffs_closed(x);
    let (extracted_f, extracted_g, condition) = identity_coeffs_extracted(x, t_samples)?;
    Ok(IdentityCoeffs {
        f1: closed.f1,
        g1: closed.g1,
        f3: closed.f3,
        g3: closed.g3,
        extracted_f,
        extracted_g,
        condition,
    })
}

/// `|x − y| / |y|`, or `|x − y|` when `y = 0`.
pub fn relative_error(x: f64, y: f64) -> f64 {
    if y == 0.0 {
        (x - y).abs()
    } else {
        (x - y).abs() / y.abs()
    }
}
