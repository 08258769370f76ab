use thiserror::Error;

/// Errors raised by the numerical kernel and the measures built on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("state vector has zero norm")]
    ZeroState,

    #[error("amplitude {index} is not finite")]
    NonFinite { index: usize },

    #[error("state norm^2 = {norm_sq} deviates from 1 by more than {tol:e}")]
    NotNormalized { norm_sq: f64, tol: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is not Hermitian (defect {0:e})")]
    NotHermitian(f64),

    #[error("expectation value has imaginary residue {0:e}")]
    ImaginaryResidue(f64),

    #[error("not a density matrix: {0}")]
    NotDensity(String),

    #[error("invalid qubit label `{0}`")]
    InvalidQubit(String),

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal {off:e})")]
    NoConvergence { sweeps: usize, off: f64 },

    #[error("{quantity} = {value:e} is negative beyond the clamp tolerance")]
    NegativeBeyondClamp { quantity: &'static str, value: f64 },

    #[error("three-tangle differs across bipartitions by {0:e}")]
    TangleSpread(f64),

    #[error("profile is not of the {0} class")]
    WrongFamily(&'static str),

    #[error("optimizer did not converge")]
    NotConverged,
}

pub type Result<T> = std::result::Result<T, Error>;
