use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },

    #[error("invalid dimensions: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian (max deviation {deviation:.3e}, allowed {allowed:.3e})")]
    NotHermitian { deviation: f64, allowed: f64 },

    #[error("eigensolver did not converge within {sweeps} sweeps (off-diagonal {off:.3e})")]
    NoConvergence { sweeps: usize, off: f64 },

    #[error("operation needs a concrete matrix; diagonal-spectrum models have no finite assembly")]
    UnsupportedModel,

    #[error("invalid diagonal spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("invalid tolerance configuration: {0}")]
    InvalidTolerance(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("resolvent applied at a non-invertible point (smallest shift {shift:.3e})")]
    SingularResolvent { shift: f64 },

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
}
