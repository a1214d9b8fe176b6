//! Multi-valued weighted composition operators on truncated Fock space.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! computation over immutable values:
//!
//! - [`linalg`]: dense complex vectors/matrices, a Jacobi SVD and the
//!   subspace toolkit (orthonormal frames, complements, principal angles).
//! - [`fock`]: the orthonormal monomial basis `z^n/sqrt(n!)`, reproducing
//!   kernels, derivative functionals and the subspaces of functions
//!   vanishing to order `m` at a point.
//! - [`relation`]: linear relations stored as graph subspaces of `H ⊕ H`,
//!   with adjoints, quotient norms and structural predicates.
//! - [`symbols`]: closed-form constructors for the maximal relation of
//!   `ψ·(f∘φ) = ϕ·g^(m)` with exponential weight and affine map, its adjoint,
//!   the weighted composition conjugations, and the symbol classifiers.
//! - [`checks`]: verification procedures producing [`checks::CheckReport`]s.

#![no_std]

extern crate alloc;

pub mod checks;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod relation;
pub mod symbols;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Shorthand for building a complex scalar.
#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
