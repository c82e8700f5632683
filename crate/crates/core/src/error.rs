use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("effective potential is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NonConfiningPotential { min_eigenvalue: f64 },

    #[error("response matrix is singular at omega = {omega}")]
    SingularResponse { omega: f64 },

    #[error("quadrature did not converge after {subdivisions} subdivisions (error estimate {error:e}, tolerance {tolerance:e})")]
    QuadratureNonConvergence {
        subdivisions: usize,
        error: f64,
        tolerance: f64,
    },

    #[error("covariance matrix is unphysical: min eig(sigma + iK/2) = {margin:e}")]
    Unphysical { margin: f64 },

    #[error("unstable parameter set: root {re} + {im}i lies in the closed upper half plane")]
    UnstableParameters { re: f64, im: f64 },

    #[error("root multiplicity: minimum root separation {separation:e} below threshold {threshold:e}")]
    RootMultiplicity { separation: f64, threshold: f64 },

    #[error("polynomial root finder failed: {0}")]
    RootFinding(String),

    #[error("bath temperature must be strictly positive for the residue engine; use the quadrature engine")]
    ZeroTemperature,

    #[error("digamma pole at z = {re} + {im}i")]
    DigammaPole { re: f64, im: f64 },

    #[error("residue sum has a non-negligible imaginary part (relative {relative:e})")]
    ComplexResidueSum { relative: f64 },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
