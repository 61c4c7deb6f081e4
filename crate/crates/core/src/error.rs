use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("temperature must be strictly positive, got kT = {0}")]
    NonPositiveTemperature(f64),

    #[error("coupling J must be nonzero for the witness to be defined")]
    ZeroCoupling,

    #[error("chain of {n_sites} sites exceeds the exact-diagonalization cap of {cap}")]
    TooManySites { n_sites: usize, cap: usize },

    #[error("operation requires a finite chain length")]
    InfiniteChain,

    #[error("site pair ({0}, {1}) is out of range or not distinct")]
    InvalidSitePair(usize, usize),

    #[error("model family {0} is not eligible for this operation")]
    IneligibleFamily(String),

    #[error("state is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositiveSemidefinite(f64),

    #[error("quadrature did not converge: estimated error {error:e} after {panels} panels")]
    QuadratureNonConvergence { error: f64, panels: usize },

    #[error("finite-difference step underflow at beta = {0:e}")]
    StepUnderflow(f64),

    #[error("{0}")]
    Domain(String),

    #[error("config: {0}")]
    Config(String),
}
