//! Norm inequality for permuted products of polynomials in free
//! semicircular variables, and coefficient extraction with its norm bound.

mod lp;
mod profile;
mod recovery;
mod sigma;

pub use lp::{brute_force_lp, lp_optimum, masterineq_rhs, LpSolution, RhsReport};
pub use profile::{
    derivative_norm_profile, level_for_budget, DerivativeNormProfile, ProfileParams,
};
pub use recovery::{coefficient_recovery, recovery_constant, vacuum_blocks};
pub use sigma::{
    m_sigma_apply, m_sigma_poly, m_sigma_simple, masterineq_check, MasterReport, PermutationSpec,
};
