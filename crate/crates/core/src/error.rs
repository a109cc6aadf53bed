use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("decomposition failed to converge: {0}")]
    DecompositionFailure(String),

    #[error("matrix has a negative eigenvalue {eigenvalue:e} below tolerance")]
    NegativeEigenvalue { eigenvalue: f64 },

    #[error("expected an even dimension, got {0}")]
    OddDimension(usize),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("invalid quantum state: {0}")]
    InvalidState(String),

    #[error("rows are not orthonormal (max deviation {0:e})")]
    NotOrthonormal(f64),

    #[error("projectors do not resolve the identity (max deviation {0:e})")]
    NotResolvingIdentity(f64),

    #[error("mean spin of mode {mode} is {mean:e}, below the floor {floor:e}; use nonlinear observables for such states")]
    ZeroMeanSpin { mode: usize, mean: f64, floor: f64 },

    #[error("generators do not commute (max |R Omega R^T| entry {0:e})")]
    NoncommutingEncoding(f64),

    #[error("observables do not commute (max commutator norm {0:e})")]
    NonCommutingObservables(f64),

    #[error("parameters are not identifiable: derivative matrix has rank {rank} < {required}")]
    UnidentifiableParameters { rank: usize, required: usize },

    #[error("mode {0} has zero weight in the parameter combination; drop it from the problem")]
    DegenerateMode(usize),

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("covariance matrix is singular")]
    SingularCovariance,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
