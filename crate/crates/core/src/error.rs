use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid model parameters: {}", .0.join(", "))]
    InvalidParams(Vec<String>),

    #[error("no physical superradiant solution at g = {g}, epsilon = {epsilon}, kappa_bar = {kappa_bar}")]
    NoSolution { g: f64, epsilon: f64, kappa_bar: f64 },

    #[error("{quantity} diverges at the phase boundary (denominator {denominator:e})")]
    BoundaryDivergence { quantity: &'static str, denominator: f64 },

    #[error("degenerate exponent fit: {0}")]
    FitDegenerate(String),

    #[error("steady state is not unique: |lambda_1| / |lambda_0| = {ratio:e}")]
    DegenerateSteadyState { ratio: f64 },

    #[error("Fock truncation too small: top-level population {population:e} exceeds {threshold:e}")]
    TruncationUnsafe { population: f64, threshold: f64 },

    #[error("density matrix has eigenvalue {min_eigenvalue:e} below the round-off floor")]
    NotPositive { min_eigenvalue: f64 },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("LAPACK {routine} failed with info = {info}")]
    Lapack { routine: &'static str, info: i32 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
