//! Truncated full Fock space over `C^m`.
//!
//! Two representations share one basis convention. Words `w_1..w_l` over
//! `[0, m)` of length `l` sit at `offset(l) + sum_k w_k m^{l-k}`, so the
//! vacuum has index 0 and levels are contiguous. [`FockVector`] is a sparse
//! exact vector that elementary [`Letter`] operators act on without any
//! truncation unless asked; [`FockOperator`] is the dense matrix of an
//! operator on a depth-`D` truncation.

mod basis;
mod families;
mod operator;
mod vector;

pub use basis::{build_basis, build_basis_capped, FockBasis, DEFAULT_DIM_CAP};
pub use families::{correlated_families, CovarianceSpec, GramVectors};
pub use operator::{compressed_word_matrix, compression, FreeModel};
pub use operator::{
    creation, delta_op, evaluate_poly, level_projection, partial_vacuum_trace, right_creation,
    semicircular_op, Assignment, FockOperator,
};
pub use vector::{vacuum_expectation, BaseVector, FockVector, Letter};
