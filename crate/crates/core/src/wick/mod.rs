//! Wick calculus for semicircular words and the configuration decomposition
//! of `tau(A_1(x^1) .. A_n(x^n))`, in split-point form and in derivative
//! form, each cross-checked against the direct trace.

mod decomposition;
mod trace;

pub use crate::fock::CovarianceSpec;
pub use decomposition::{
    all_monomials, chord_factor, edgtn_lhs, edgtn_rhs, edgtn_rhs_terms, enumerate_splits, hkz_eval,
    hkz_route, RhsTerm, SplitAssignment, MAX_TOTAL_DEGREE,
};
pub use trace::{free_trace, operator_valued_trace, semicircular_trace, word_trace, FamilyWord};
