use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate metric: det = {det:e}")]
    DegenerateMetric { det: f64 },

    #[error("umbilic point: |a - b| = {gap:e} below threshold {threshold:e}")]
    UmbilicPoint { gap: f64, threshold: f64 },

    #[error("unknown surface `{0}`")]
    UnknownSurface(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("mean curvature vector vanishes: |H| = {norm:e}")]
    VanishingH { norm: f64 },

    #[error("f3/g3 require e1a + e1b = e2a + e2b = 0 (residuals {r1:e}, {r2:e})")]
    ConstraintViolated { r1: f64, r2: f64 },

    #[error("Vandermonde system ill-conditioned: cond = {cond:e}")]
    IllConditioned { cond: f64 },

    #[error("every sample point was excluded")]
    AllSamplesExcluded,

    #[error("insufficient samples: got {got}, need at least {need}")]
    InsufficientSamples { got: usize, need: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::DegenerateMetric { .. }
                | Error::UmbilicPoint { .. }
                | Error::VanishingH { .. }
                | Error::IllConditioned { .. }
                | Error::AllSamplesExcluded
                | Error::InsufficientSamples { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
