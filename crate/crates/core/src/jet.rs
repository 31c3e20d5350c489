//! Truncated bivariate Taylor polynomials of total degree 3.
//!
//! A [`Jet`] carries the Taylor coefficients of a scalar function of the chart
//! coordinates `(u, v)` around a base point. Arithmetic propagates every
//! coefficient exactly (up to rounding), so evaluating a parametrization with
//! seeded jets yields all partial derivatives through order 3 without
//! hand-coding them.
//!
//! Coefficients are stored as Taylor coefficients, i.e. `c[i,j] = ∂ᵤⁱ∂ᵥʲf / (i! j!)`.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Maximum total degree carried by a [`Jet`].
pub const ORDER: usize = 3;

/// Number of stored coefficients (monomials of total degree ≤ 3 in two variables).
pub const LEN: usize = 10;

/// Exponent pairs `(i, j)` of `uⁱvʲ`, graded by total degree.
pub const MONOMIALS: [(usize, usize); LEN] = [
    (0, 0),
    (1, 0),
    (0, 1),
    (2, 0),
    (1, 1),
    (0, 2),
    (3, 0),
    (2, 1),
    (1, 2),
    (0, 3),
];

/// Position of monomial `uⁱvʲ` in the coefficient array.
#[inline]
pub const fn index(i: usize, j: usize) -> usize {
    let d = i + j;
    d * (d + 1) / 2 + j
}

const FACTORIAL: [f64; 4] = [1.0, 1.0, 2.0, 6.0];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    c: [f64; LEN],
}

impl Jet {
    pub const fn constant(value: f64) -> Self {
        let mut c = [0.0; LEN];
        c[0] = value;
        Jet { c }
    }

    /// The coordinate function `u`, expanded around `u0`.
    pub const fn var_u(u0: f64) -> Self {
        let mut c = [0.0; LEN];
        c[0] = u0;
        c[1] = 1.0;
        Jet { c }
    }

    /// The coordinate function `v`, expanded around `v0`.
    pub const fn var_v(v0: f64) -> Self {
        let mut c = [0.0; LEN];
        c[0] = v0;
        c[2] = 1.0;
        Jet { c }
    }

    pub const fn from_coeffs(c: [f64; LEN]) -> Self {
        Jet { c }
    }

    pub fn coeffs(&self) -> &[f64; LEN] {
        &self.c
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Partial derivative `∂ᵤⁱ∂ᵥʲ` at the base point. Requires `i + j ≤ 3`.
    pub fn partial(&self, i: usize, j: usize) -> f64 {
        assert!(i + j <= ORDER, "partial of order {} exceeds jet order", i + j);
        self.c[index(i, j)] * FACTORIAL[i] * FACTORIAL[j]
    }

    /// Jet of `∂f/∂u`. The top-degree coefficients are unknown and set to
    /// zero, so the result is only valid through total degree 2.
    pub fn d_u(&self) -> Self {
        let mut c = [0.0; LEN];
        for (k, &(i, j)) in MONOMIALS.iter().enumerate() {
            if i + j < ORDER {
                c[k] = (i + 1) as f64 * self.c[index(i + 1, j)];
            }
        }
        Jet { c }
    }

    /// Jet of `∂f/∂v`; valid through total degree 2.
    pub fn d_v(&self) -> Self {
        let mut c = [0.0; LEN];
        for (k, &(i, j)) in MONOMIALS.iter().enumerate() {
            if i + j < ORDER {
                c[k] = (j + 1) as f64 * self.c[index(i, j + 1)];
            }
        }
        Jet { c }
    }

    /// Applies a univariate function given its value and first three
    /// derivatives at the base value.
    fn compose(&self, f: [f64; 4]) -> Self {
        let mut delta = *self;
        delta.c[0] = 0.0;
        let d2 = delta * delta;
        let d3 = d2 * delta;
        let mut out = Jet::constant(f[0]);
        for k in 1..LEN {
            out.c[k] = f[1] * delta.c[k] + 0.5 * f[2] * d2.c[k] + f[3] / 6.0 * d3.c[k];
        }
        out
    }

    pub fn recip(&self) -> Self {
        let x = self.c[0];
        let r = 1.0 / x;
        self.compose([r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r])
    }

    pub fn sqrt(&self) -> Self {
        let x = self.c[0];
        let s = x.sqrt();
        self.compose([s, 0.5 / s, -0.25 / (s * x), 0.375 / (s * x * x)])
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.c[0].sin_cos();
        self.compose([s, c, -s, -c])
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.c[0].sin_cos();
        self.compose([c, -s, -c, s])
    }

    pub fn exp(&self) -> Self {
        let e = self.c[0].exp();
        self.compose([e; 4])
    }

    pub fn sinh(&self) -> Self {
        let (s, c) = (self.c[0].sinh(), self.c[0].cosh());
        self.compose([s, c, s, c])
    }

    pub fn cosh(&self) -> Self {
        let (s, c) = (self.c[0].sinh(), self.c[0].cosh());
        self.compose([c, s, c, s])
    }

    pub fn ln(&self) -> Self {
        let x = self.c[0];
        let r = 1.0 / x;
        self.compose([x.ln(), r, -r * r, 2.0 * r * r * r])
    }

    pub fn powi(&self, n: i32) -> Self {
        match n {
            0 => Jet::constant(1.0),
            n if n < 0 => self.powi(-n).recip(),
            n => {
                let mut acc = *self;
                for _ in 1..n {
                    acc = acc * *self;
                }
                acc
            }
        }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(mut self, rhs: Jet) -> Jet {
        for (a, b) in self.c.iter_mut().zip(rhs.c) {
            *a += b;
        }
        self
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: Jet) -> Jet {
        for (a, b) in self.c.iter_mut().zip(rhs.c) {
            *a -= b;
        }
        self
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(mut self) -> Jet {
        for a in self.c.iter_mut() {
            *a = -*a;
        }
        self
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let mut c = [0.0; LEN];
        for (p, &(i1, j1)) in MONOMIALS.iter().enumerate() {
            let a = self.c[p];
            if a == 0.0 {
                continue;
            }
            for (q, &(i2, j2)) in MONOMIALS.iter().enumerate() {
                if i1 + j1 + i2 + j2 > ORDER {
                    break;
                }
                c[index(i1 + i2, j1 + j2)] += a * rhs.c[q];
            }
        }
        Jet { c }
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Jet) -> Jet {
        self * rhs.recip()
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.c[0] += rhs;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: f64) -> Jet {
        self.c[0] -= rhs;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(mut self, rhs: f64) -> Jet {
        for a in self.c.iter_mut() {
            *a *= rhs;
        }
        self
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, rhs: f64) -> Jet {
        self * (1.0 / rhs)
    }
}

impl Add<Jet> for f64 {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        rhs + self
    }
}

impl Sub<Jet> for f64 {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        -rhs + self
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        rhs * self
    }
}

/// A 3-vector of jets.
pub type JetVec3 = [Jet; 3];

pub fn dot3(a: &JetVec3, b: &JetVec3) -> Jet {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross3(a: &JetVec3, b: &JetVec3) -> JetVec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn d_u3(a: &JetVec3) -> JetVec3 {
    [a[0].d_u(), a[1].d_u(), a[2].d_u()]
}

pub fn d_v3(a: &JetVec3) -> JetVec3 {
    [a[0].d_v(), a[1].d_v(), a[2].d_v()]
}
