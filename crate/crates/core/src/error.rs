use thiserror::Error;

/// Failure modes shared by every module.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max entry deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not unitary (max entry deviation of U^dag U from I is {deviation:e})")]
    NotUnitary { deviation: f64 },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("eigensolver failed to converge")]
    ConvergenceFailure,
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("{sites} sites exceeds the dense limit ({max} sites)")]
    DimensionTooLarge { sites: usize, max: usize },
    #[error("expected dimension {expected}, got {got}")]
    WrongDimension { expected: usize, got: usize },
    #[error("path parameter s = {0} lies outside [0, 1]")]
    OutOfRange(f64),
    #[error("time-ordered product not converged to {tol:e} after {substeps} substeps")]
    NoConvergence { tol: f64, substeps: usize },
    #[error("ground state at s = {s} is degenerate (gap {gap:e})")]
    DegenerateEndpoint { s: f64, gap: f64 },
    #[error("spectral gap closes at s = {s} (gap {gap:e})")]
    GapClosure { s: f64, gap: f64 },
    #[error("degenerate path at step {step}: levels {l} and {m} coincide")]
    DegeneratePath { step: usize, l: usize, m: usize },
    #[error("ground state is degenerate (gap {gap:e})")]
    DegenerateGround { gap: f64 },
    #[error("omega vanishes at s = {s}: lambda * dt sits on a resonance")]
    OmegaZero { s: f64 },
    #[error("need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("every dt on the grid passes the near-degeneracy test")]
    AllPass,
    #[error("every dt on the grid fails the near-degeneracy test")]
    AllFail,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
