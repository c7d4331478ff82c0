//! Grid discretizations of `P` and `π(-Δ)`, eigenvalue counting by matrix
//! inertia, lowest eigenvalues, heat traces and the weighted Sobolev
//! inequality.
//!
//! Counts are strict: `inertia_count(H, λ)` is the number of eigenvalues
//! `< λ`.

mod assemble;
mod grid;
mod heat;
mod lanczos;
mod ldl;
mod matrix;
mod scalar;
mod sobolev;

pub use assemble::{assemble, nodal_operator, GridOp, HermitianOperatorGrid, OperatorSpec};
pub use grid::{GridSpec, DEFAULT_POINT_CAP};
pub use heat::{heat_trace, tail_bound, HeatTrace};
pub use lanczos::{lowest_eigs, lowest_eigs_with, LanczosOptions, RESIDUAL_TOL};
pub use ldl::{factor_shifted, inertia_count, kth_eigenvalue, BandLdl, Factorization};
pub use matrix::{HermitianMatrix, SparseHermitian};
pub use scalar::Scalar;
pub use sobolev::{SobolevContext, BOX_SCALES, MAX_ORDER};
