//! Spectral counting toolkit for nilpotent sublaplacians and polynomial magnetic
//! Schrödinger operators.
//!
//! The crate computes two kinds of quantities and compares them:
//!
//! * geometric proxies: the phase-space volume `N₀(λ)` of `{M(x, ξ)² ≤ λ}` and the
//!   orbit integral `Z₀(t) = ∫ exp(-t M²) dx dξ` ([`phasespace`]);
//! * spectral data of the discretized operator: eigenvalue counts `N(λ)` through
//!   matrix inertia, low eigenvalues and heat traces ([`spectral`]).
//!
//! The weights `M` come either from a [`schrodinger::SchrodingerModel`] or from a
//! representation of a stratified nilpotent Lie algebra in triangular form
//! ([`nilpotent`]). Two-sided equivalence constants are fitted by [`fit`].
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
// NaN must fail range checks, and index loops mirror the stencil formulas
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod interp;
pub mod fit;
pub mod linalg;
pub mod nilpotent;
pub mod phasespace;
pub mod polynomial;
pub mod schrodinger;
pub mod spectral;

pub use error::{Error, Result};
pub use polynomial::{ArithOp, Monomial, MultiPoly};
