use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input failed a structural or parameter-domain check.
    #[error("invalid input: {0}")]
    Validation(String),

    #[error("matrix is not Hermitian: max |M - M^H| = {deviation:e}")]
    NonHermitian { deviation: f64 },

    /// An argument lies outside the mathematical domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("eigensolver did not converge after {sweeps} sweeps (residual {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    /// The k-mesh is too coarse to resolve a phase increment or link overlap.
    #[error("mesh too coarse: {detail}; increase the number of k-points")]
    MeshTooCoarse { detail: String },

    #[error("spectrum is gapless (gap {gap:e} <= tolerance {tol:e})")]
    Gapless { gap: f64, tol: f64 },

    /// The argument of a complex number of (near-)zero modulus was requested.
    #[error("ill-conditioned argument: |z| = {modulus:e}")]
    IllConditionedArg { modulus: f64 },

    #[error("chiral symmetry violated: {0}")]
    ChiralSymmetry(String),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn mesh(detail: impl Into<String>) -> Self {
        Error::MeshTooCoarse {
            detail: detail.into(),
        }
    }
}
