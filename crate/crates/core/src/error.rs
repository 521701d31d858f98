use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma function pole at {0}")]
    GammaPole(f64),

    #[error("hypergeometric lower parameter c = {c} hits zero before termination at degree {n}")]
    DenominatorPole { c: f64, n: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("weight is unbounded at theta = {0}")]
    SingularPoint(f64),

    #[error("degree {needed} exceeds available {available}")]
    DegreeExceeded { needed: usize, available: usize },

    #[error("Verblunsky coefficient {index} has modulus {modulus} (must be < 1)")]
    OutsideDisk { index: usize, modulus: f64 },

    #[error("moment table is not positive definite at degree {degree} (|alpha| = {modulus})")]
    NotPositiveDefinite { degree: usize, modulus: f64 },

    #[error("root finder did not converge after {iterations} iterations (residual {residual:e})")]
    RootsNotConverged { iterations: usize, residual: f64 },

    #[error("polynomial has a zero of modulus {modulus} outside the admissible disk")]
    ZeroOutsideDisk { modulus: f64 },

    #[error("near-singular Gram matrix (condition {condition:e})")]
    SingularGram { condition: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
