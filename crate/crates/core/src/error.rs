use thiserror::Error;

/// Errors produced by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// Argument outside the mathematical domain of a function, e.g. a
    /// negative argument to the entropy function.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("spectral error: {0}")]
    Spectral(String),

    /// The energy constraint `theta <= 1` is violated.
    #[error("energy constraint violated: theta = {theta} > 1")]
    ConstraintViolation { theta: f64 },

    #[error("encoding scheme `{scheme}` is not valid for the {kind} rate")]
    InvalidScheme { kind: &'static str, scheme: &'static str },

    #[error("solver did not converge: {0}")]
    Solver(String),

    #[error("argument {x} outside supported range |x| <= {limit}")]
    Range { x: f64, limit: f64 },

    #[error("quadrature did not converge after {subdivisions} subdivisions (error estimate {estimate:e})")]
    Quadrature { subdivisions: usize, estimate: f64 },

    #[error("search bracket diverged past |y| = {limit}")]
    Divergence { limit: f64 },

    /// A sweep failed at one of its grid points.
    #[error("at {point}: {source}")]
    GridPoint { point: String, source: Box<Error> },
}

pub type Result<T> = std::result::Result<T, Error>;
