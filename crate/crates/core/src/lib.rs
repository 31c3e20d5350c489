//! Numerical geometry of the normal bundle `T⊥M` of a surface `M ⊂ R³`,
//! immersed in `C³ ≅ R³ × R³` as a Lagrangian submanifold by `f(x, t) = (x, tN)`.
//!
//! The crate evaluates closed-form curvature invariants of `T⊥M` (the mean
//! curvature vector `H`, the Maslov field `JH`, the Maslovian residuals
//! `F₁₂, F₁₃, F₂₃`), cross-checks them against a brute-force geometric oracle
//! that only sees the raw surface chart, and classifies surfaces by sampling.
//!
//! Module map:
//! - [`jet`]: truncated Taylor arithmetic used to differentiate charts.
//! - [`surface`]: charts, fundamental forms, principal frames, catalog.
//! - [`bundle`]: the immersion `f`, complex structure `J`, adapted frames.
//! - [`maslov`]: closed-form `P, Q, R`, `H`, `JH`, `F_ij`, coefficient identities.
//! - [`oracle`]: induced metric, Christoffel symbols, Laplace–Beltrami `H`.
//! - [`classify`]: grid sampling, verdicts, shape recognition, reports.
//! - [`verify`]: the end-to-end acceptance matrix.

pub mod bundle;
pub mod classify;
pub mod error;
pub mod jet;
pub mod maslov;
pub mod oracle;
pub mod par;
pub mod report;
pub mod surface;
pub mod verify;

pub use error::{Error, Result};

/// `R⁶ = R³ × R³`, the real picture of `C³`.
pub type Vec6 = nalgebra::SVector<f64, 6>;
