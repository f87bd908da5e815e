use thiserror::Error;

/// Failures raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (max |M - M^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("not a density matrix: {0}")]
    InvalidState(String),

    /// A matrix is numerically singular (smallest/largest singular value
    /// below the inversion threshold).
    #[error("matrix is singular (smallest/largest singular value = {ratio:e})")]
    Singular { ratio: f64 },

    /// The dynamical map is not invertible at the requested point, so the
    /// intermediate map is undefined.
    #[error("map is singular at q = {q} (smallest/largest singular value = {ratio:e})")]
    SingularMap { q: f64, ratio: f64 },

    /// The canonical decay rate diverges (G(p) = 0).
    #[error("decay rate diverges at p = {p}")]
    SingularRate { p: f64 },

    /// alpha = 0 has no finite crossover point.
    #[error("no singularity exists for alpha = {alpha}")]
    NoSingularity { alpha: f64 },

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
}

pub type Result<T> = std::result::Result<T, Error>;
