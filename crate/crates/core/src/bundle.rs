//! The Lagrangian immersion `f(x, t) = (x, tN)` of the normal bundle into
//! `C³ ≅ R³ × R³` and its adapted frames.
//!
//! The tangent frame is `ẽ₁ = (1+t²a²)^{-1/2} e₁`, `ẽ₂ = (1+t²b²)^{-1/2} e₂`,
//! `ẽ₃ = ∂/∂t`, with pushforwards
//! `f_*(ẽ₁) = (1+t²a²)^{-1/2}(e₁, −ta e₁)`, `f_*(ẽ₂) = (1+t²b²)^{-1/2}(e₂, −tb e₂)`,
//! `f_*(ẽ₃) = (0, N)`. The normal frame is `e_{3+i} = J f_*(ẽᵢ)`.

use crate::surface::PrincipalData;
use crate::Vec6;
use nalgebra::Vector3;

/// A point `(p, t)` of `T⊥M`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BundlePoint {
    pub p: crate::surface::ChartPoint,
    pub t: f64,
}

/// Orthonormal adapted frame of `R⁶` along the immersed bundle.
#[derive(Clone, Copy, Debug)]
pub struct BundleFrames {
    /// `f_*(ẽ₁), f_*(ẽ₂), f_*(ẽ₃)`.
    pub tangent: [Vec6; 3],
    /// `e₄, e₅, e₆`.
    pub normal: [Vec6; 3],
}

impl BundleFrames {
    /// The six vectors `fe₁, fe₂, fe₃, e₄, e₅, e₆` in order.
    pub fn all(&self) -> [Vec6; 6] {
        [
            self.tangent[0],
            self.tangent[1],
            self.tangent[2],
            self.normal[0],
            self.normal[1],
            self.normal[2],
        ]
    }

    /// Components of `w` in the tangent frame.
    pub fn tangent_components(&self, w: &Vec6) -> [f64; 3] {
        [self.tangent[0].dot(w), self.tangent[1].dot(w), self.tangent[2].dot(w)]
    }
}

pub fn join(x: &Vector3<f64>, y: &Vector3<f64>) -> Vec6 {
    Vec6::new(x[0], x[1], x[2], y[0], y[1], y[2])
}

/// `J(X, Y) = (−Y, X)`.
pub fn complex_structure(w: &Vec6) -> Vec6 {
    Vec6::new(-w[3], -w[4], -w[5], w[0], w[1], w[2])
}

/// `f(x, t) = (x, tN)`.
pub fn immerse(pd: &PrincipalData, t: f64) -> Vec6 {
    join(&pd.x, &(pd.normal * t))
}

/// Unnormalized pushforwards `f_*(e₁) = (e₁, −ta e₁)`, `f_*(e₂) = (e₂, −tb e₂)`
/// of the horizontal lifts of the principal directions.
pub fn horizontal_pushforwards(pd: &PrincipalData, t: f64) -> [Vec6; 2] {
    [
        join(&pd.e1, &(pd.e1 * (-t * pd.a))),
        join(&pd.e2, &(pd.e2 * (-t * pd.b))),
    ]
}

pub fn frames(pd: &PrincipalData, t: f64) -> BundleFrames {
    let ca = 1.0 / (1.0 + t * t * pd.a * pd.a).sqrt();
    let cb = 1.0 / (1.0 + t * t * pd.b * pd.b).sqrt();
    let [l1, l2] = horizontal_pushforwards(pd, t);
    let tangent = [l1 * ca, l2 * cb, join(&Vector3::zeros(), &pd.normal)];
    let normal = [
        complex_structure(&tangent[0]),
        complex_structure(&tangent[1]),
        complex_structure(&tangent[2]),
    ];
    BundleFrames { tangent, normal }
}
