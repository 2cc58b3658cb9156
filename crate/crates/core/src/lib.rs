//! Computational free probability: noncommutative polynomials and their
//! derivatives, non-crossing and configuration combinatorics, an exact
//! full-Fock-space engine, the generalized Wick decomposition of traces of
//! products of semicircular monomials, operator-norm inequalities, and a
//! GUE laboratory with exact genus-expansion oracles.
//!
//! Modules are layered bottom-up:
//!
//! - [`ncalg`]: polynomials over `X_1..X_d, Z_1..Z_q` with scalar or matrix
//!   coefficients, adjoints, the DSL, and noncommutative derivatives.
//! - [`combin`]: circle sets, non-crossing pair partitions, configurations.
//! - [`fock`]: truncated full Fock space, creation/annihilation operators,
//!   vacuum traces, norms, correlated semicircular families.
//! - [`wick`]: semicircular traces and the configuration decomposition.
//! - [`bounds`]: the permuted-product norm inequality and coefficient recovery.
//! - [`rmt`]: GUE/Haar sampling, Monte Carlo, genus expansion, Harer–Zagier.

pub mod bounds;
pub mod combin;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod ncalg;
pub mod rmt;
pub mod wick;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = nalgebra::Complex<f64>;

/// Dense complex matrix used for coefficients and operators.
pub type CMatrix = nalgebra::DMatrix<C64>;

#[cfg(test)]
mod testutil;
