//! Random-matrix side: GUE and Haar sampling, an exact Wick oracle for GUE
//! moments, Monte Carlo norm estimates and strong-convergence experiments.

mod genus;
mod montecarlo;
mod sampling;
mod strong;

pub use genus::{
    expansion_coefficients, gue_exact_mixed_moment, harer_zagier_moments, harer_zagier_polynomials,
    ExactMoment, MAX_GENUS_WORD, MAX_HZ_ORDER,
};
pub use montecarlo::{
    mc_lp_norm, mc_moment, rows_to_csv, MomentRow, CSV_HEADER, MAX_MC_N, MAX_MC_SAMPLES,
};
pub use sampling::{
    eval_poly_matrices, sample_gue, sample_gue_spectrum, sample_haar, GueSample, RngSpec,
};
pub use strong::{
    free_side_norm, strong_convergence_experiment, tail_check, wilson_interval, FreeNorm,
    StrongReport, StrongRow, TailReport, TailRow,
};
