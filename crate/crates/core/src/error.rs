use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension must be at least 2, got {0}")]
    InvalidDimension(usize),
    #[error("unsupported dimension {0}: mutually unbiased bases are only built for prime dimensions")]
    UnsupportedDimension(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("map is not trace preserving (residual {0:.3e})")]
    NotTracePreserving(f64),
    #[error("map is not Hermiticity preserving (imaginary residual {0:.3e})")]
    NotHermiticityPreserving(f64),
    #[error("generator is not trace annihilating (residual {0:.3e})")]
    NotTraceAnnihilating(f64),
    #[error("defective map: eigenvalue {re:.6e}{im:+.6e}i has fewer eigenvectors than its multiplicity")]
    DefectiveMap { re: f64, im: f64 },
    #[error("expected {expected} rate functions, got {found}")]
    RateCount { expected: usize, found: usize },
    #[error("singular generator at t = {t}")]
    SingularGenerator { t: f64 },
    #[error("generator is not commutative: residual {residual:.3e} at (t, s) = ({t}, {s})")]
    NotCommutative { t: f64, s: f64, residual: f64 },
    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },
    #[error("non-invertible frame at t = {t} (|det| = {det:.3e})")]
    NonInvertibleFrame { t: f64, det: f64 },
    #[error("time {0} is not on the grid")]
    NotOnGrid(f64),
    #[error("invalid time grid: {0}")]
    InvalidGrid(&'static str),
    #[error("time {t} outside the tabulated domain [{start}, {end}]")]
    OutOfDomain { t: f64, start: f64, end: f64 },
    #[error("invalid tabulated rate: {0}")]
    InvalidTable(&'static str),
    #[error("non-Hermitian input: {0}")]
    NotHermitian(&'static str),
    #[error("invalid state: {0}")]
    InvalidState(&'static str),
    #[error("positivity order k = {k} exceeds the dimension {dim}")]
    OrderTooLarge { k: usize, dim: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
