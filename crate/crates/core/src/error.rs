use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

/// Which structural axiom of a stratified algebra failed, with the offending basis indices
/// (zero-based).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraViolation {
    #[error("antisymmetry fails: c[{i}][{j}][{k}] != -c[{j}][{i}][{k}]")]
    Antisymmetry { i: usize, j: usize, k: usize },
    #[error("Jacobi identity fails on basis triple ({i}, {j}, {k})")]
    Jacobi { i: usize, j: usize, k: usize },
    #[error("grading fails: [Y{i}, Y{j}] has a component on Y{k} outside the allowed stratum")]
    Grading { i: usize, j: usize, k: usize },
    #[error("generation fails: brackets of the first stratum span {rank} of {dim} dimensions")]
    Generation { rank: usize, dim: usize },
    #[error("strata do not partition the basis: {0}")]
    Strata(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid algebra: {0}")]
    Algebra(#[from] AlgebraViolation),

    #[error("representation is not a homomorphism on basis pair ({i}, {j})")]
    Homomorphism { i: usize, j: usize },

    #[error("structural error: {0}")]
    Structural(String),

    #[error("sublevel set at lambda = {lambda} is unbounded (box half-width reached {cap})")]
    UnboundedSublevel { lambda: f64, cap: f64 },

    #[error("model is degenerate along direction {direction:?}")]
    Degenerate { direction: Vec<f64> },

    #[error("grid too large: {points} points exceeds cap {cap}")]
    GridCap { points: usize, cap: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("inconsistent spectral data: {0}")]
    Inconsistent(String),

    #[error("no constant C <= {max} satisfies the two-sided bound; first violation at {argument}")]
    Infeasible { max: f64, argument: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;
