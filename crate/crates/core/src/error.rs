use thiserror::Error;

/// Where a failure originated: module and operation name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Origin {
    pub module: &'static str,
    pub operation: &'static str,
}

impl Origin {
    pub const fn new(module: &'static str, operation: &'static str) -> Self {
        Origin { module, operation }
    }
}

impl std::fmt::Display for Origin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}::{}", self.module, self.operation)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    /// Curve parameters that do not describe a smooth simple closed curve.
    #[error("{origin}: invalid geometry: {reason}")]
    Geometry { origin: Origin, reason: String },

    /// The normal shift produced a curve that folds or self-intersects.
    #[error("{origin}: perturbed boundary is not simple: {reason}")]
    Perturbation { origin: Origin, reason: String },

    /// The single-layer operator is (numerically) singular; the curve has
    /// logarithmic capacity close to one and must be rescaled.
    #[error("{origin}: single-layer operator singular (smallest singular value {sigma_min:e}); rescale required")]
    RescaleRequired { origin: Origin, sigma_min: f64 },

    #[error("{origin}: linear algebra failure: {reason}")]
    Assembly { origin: Origin, reason: String },

    /// An eigenvalue landed on a value where the eigenvalue map is singular.
    #[error("{origin}: degenerate spectrum: {reason}")]
    Degeneracy { origin: Origin, reason: String },

    /// The quadratic form in the denominator vanishes: the boundary function
    /// is (numerically) constant, i.e. the infinite eigenvalue branch.
    #[error("{origin}: constant boundary data (infinite plasmonic eigenvalue)")]
    InfiniteEigenvalue { origin: Origin },

    /// Grid or band-limit mismatch in the spherical-harmonic machinery.
    #[error("{origin}: shape mismatch: {reason}")]
    Shape { origin: Origin, reason: String },

    /// The chosen eigenfunction does not diagonalise the first-order form on
    /// its (degenerate) eigenspace.
    #[error("{origin}: branch {branch} is not a splitting basis vector (residual {residual:e})")]
    Splitting {
        origin: Origin,
        branch: usize,
        residual: f64,
    },

    #[error("{origin}: invalid input: {reason}")]
    Input { origin: Origin, reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by the user's configuration rather than numerics.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Json(_) | Error::Input { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
