use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampling::{eval_poly_matrices, sample_gue, sample_gue_spectrum, RngSpec};
use crate::fock::{compression, FreeModel};
use crate::linalg::{op_norm, pairwise_sum};
use crate::ncalg::NcPoly;
use crate::{CMatrix, Error, Result, C64};

pub const MAX_STRONG_M: usize = 8;
pub const MAX_STRONG_DEGREE: usize = 4;
pub const MAX_STRONG_N: usize = 512;
pub const MAX_TAIL_N: usize = 256;
pub const TAIL_THRESHOLDS: [f64; 3] = [0.2, 0.5, 1.0];
/// Largest compressed matrix formed on the free side.
pub const FREE_DIM_BUDGET: usize = 8192;

/// Norm of `P(x (x) 1, 1 (x) y)` from compressions at doubling levels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreeNorm {
    pub value: f64,
    /// Last change between successive levels.
    pub uncertainty: f64,
    pub level: usize,
    pub converged: bool,
}

fn fock_dim(d: usize, level: usize) -> usize {
    if d == 1 {
        level + 1
    } else {
        (d.pow(level as u32 + 1) - 1) / (d - 1)
    }
}

/// Compressions of `P` with `Z_j = ys[j]` at levels `1, 2, 4, ..` until two
/// successive norms differ by less than `tol`. Every value is a lower bound.
pub fn free_side_norm(p: &NcPoly, ys: &[CMatrix], tol: f64) -> Result<FreeNorm> {
    let d = p.alphabet().d.max(1);
    let model = FreeModel::free(d).with_deterministic(ys.to_vec());
    let width = p.algebra().dim() * model.aux_dim();
    let mut level = 1;
    let mut prev = op_norm(&compression(&model, p, level)?)?;
    loop {
        let next_level = 2 * level;
        if width * fock_dim(d, next_level) > FREE_DIM_BUDGET {
            return Ok(FreeNorm {
                value: prev,
                uncertainty: f64::INFINITY,
                level,
                converged: false,
            });
        }
        let value = op_norm(&compression(&model, p, next_level)?)?;
        let step = (value - prev).abs();
        level = next_level;
        if step < tol {
            return Ok(FreeNorm {
                value,
                uncertainty: step,
                level,
                converged: true,
            });
        }
        prev = value;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrongRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub mean_norm: f64,
    pub stderr_norm: f64,
    pub mean_lp: f64,
    pub stderr_lp: f64,
    /// `mean_norm - free norm`.
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrongReport {
    pub k: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub samples: usize,
    pub seed: u64,
    pub free: FreeNorm,
    pub rows: Vec<StrongRow>,
}

fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = pairwise_sum(xs) / n;
    let dev: Vec<f64> = xs.iter().map(|x| (x - mean).powi(2)).collect();
    (mean, (pairwise_sum(&dev) / (n - 1.0).max(1.0) / n).sqrt())
}

fn trace_power(m: &CMatrix, k: usize) -> f64 {
    let h = m.adjoint() * m;
    let mut acc = h.clone();
    for _ in 1..k {
        acc = &acc * &h;
    }
    acc.trace().re
}

/// Spectral norm and `L^{2k}` norm of `P(X^N (x) I_M, I_N (x) Y)` for one sample.
fn strong_sample(
    p: &NcPoly,
    ys: &[CMatrix],
    m: usize,
    k: usize,
    n: usize,
    spec: RngSpec,
) -> Result<(f64, f64)> {
    let d = p.alphabet().d;
    let c = p.algebra().dim();
    let normalizer = (c * n * m) as f64;
    if d <= 1 {
        // X^N (x) I_M is diagonal in the eigenbasis of X^N, so the operator splits
        // into the blocks P(lambda, Y).
        let ev = sample_gue_spectrum(n, &mut spec.rng())?;
        let mut norm = 0.0f64;
        let mut traces = Vec::with_capacity(n);
        for l in ev {
            let x = CMatrix::identity(m, m) * C64::new(l, 0.0);
            let block = eval_poly_matrices(p, &[x], ys)?;
            norm = norm.max(op_norm(&block)?);
            traces.push(trace_power(&block, k));
        }
        let lp = (pairwise_sum(&traces) / normalizer)
            .max(0.0)
            .powf(1.0 / (2 * k) as f64);
        return Ok((norm, lp));
    }
    let g = sample_gue(n, d, &mut spec.rng())?;
    let id_m = CMatrix::identity(m, m);
    let id_n = CMatrix::identity(n, n);
    let xs: Vec<CMatrix> = g.matrices.iter().map(|x| x.kronecker(&id_m)).collect();
    let zs: Vec<CMatrix> = ys.iter().map(|y| id_n.kronecker(y)).collect();
    let full = eval_poly_matrices(p, &xs, &zs)?;
    let lp = (trace_power(&full, k) / normalizer)
        .max(0.0)
        .powf(1.0 / (2 * k) as f64);
    Ok((op_norm(&full)?, lp))
}

/// Monte Carlo norms of `P(X^N (x) I_M, I_N (x) Y_M)` over an `N` grid next
/// to the free-side norm of `P(x (x) 1, 1 (x) y)`. `Z_j` letters take `ys[j]`.
pub fn strong_convergence_experiment(
    p: &NcPoly,
    n_grid: &[usize],
    ys: &[CMatrix],
    k: usize,
    samples: usize,
    seed: u64,
) -> Result<StrongReport> {
    let m = ys.first().map_or(1, |y| y.nrows());
    if m > MAX_STRONG_M || ys.iter().any(|y| y.nrows() != m || y.ncols() != m) {
        return Err(Error::Capacity(format!(
            "Y matrices must be square of one size <= {MAX_STRONG_M}"
        )));
    }
    if p.degree().unwrap_or(0) > MAX_STRONG_DEGREE {
        return Err(Error::Capacity(format!("degree above {MAX_STRONG_DEGREE}")));
    }
    if n_grid.iter().any(|&n| n == 0 || n > MAX_STRONG_N) {
        return Err(Error::Capacity(format!(
            "N must lie in [1, {MAX_STRONG_N}]"
        )));
    }
    if k == 0 || samples < 2 {
        return Err(Error::InvalidInput(
            "need k >= 1 and at least two samples".into(),
        ));
    }
    let free = free_side_norm(p, ys, 1e-3)?;
    let mut rows = Vec::new();
    for &n in n_grid {
        let values: Vec<(f64, f64)> = (0..samples as u64)
            .into_par_iter()
            .map(|s| strong_sample(p, ys, m, k, n, RngSpec::new(seed, ((n as u64) << 40) | s)))
            .collect::<Result<_>>()?;
        let norms: Vec<f64> = values.iter().map(|v| v.0).collect();
        let lps: Vec<f64> = values.iter().map(|v| v.1).collect();
        let (mean_norm, stderr_norm) = mean_stderr(&norms);
        let (mean_lp, stderr_lp) = mean_stderr(&lps);
        rows.push(StrongRow {
            n,
            mean_norm,
            stderr_norm,
            mean_lp,
            stderr_lp,
            gap: mean_norm - free.value,
        });
    }
    Ok(StrongReport {
        k,
        m,
        samples,
        seed,
        free,
        rows,
    })
}

/// Wilson score interval for `successes / total` at normal quantile `z`.
pub fn wilson_interval(successes: usize, total: usize, z: f64) -> (f64, f64) {
    if total == 0 {
        return (0.0, 1.0);
    }
    let n = total as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailRow {
    pub u: f64,
    pub exceed: usize,
    pub freq: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    #[serde(rename = "N")]
    pub n: usize,
    pub samples: usize,
    pub median: f64,
    pub rows: Vec<TailRow>,
}

/// Exceedance frequencies of `||X^N|| >= 2 + u` over [`TAIL_THRESHOLDS`].
pub fn tail_check(n: usize, samples: usize, seed: u64) -> Result<TailReport> {
    if n == 0 || n > MAX_TAIL_N {
        return Err(Error::Capacity(format!("N must lie in [1, {MAX_TAIL_N}]")));
    }
    if samples == 0 {
        return Err(Error::InvalidInput("need at least one sample".into()));
    }
    let mut norms: Vec<f64> = (0..samples as u64)
        .into_par_iter()
        .map(|s| {
            let ev = sample_gue_spectrum(n, &mut RngSpec::new(seed, s).rng())?;
            Ok(ev.iter().fold(0.0f64, |m, l| m.max(l.abs())))
        })
        .collect::<Result<_>>()?;
    norms.sort_by(f64::total_cmp);
    let median = if samples % 2 == 1 {
        norms[samples / 2]
    } else {
        0.5 * (norms[samples / 2 - 1] + norms[samples / 2])
    };
    let rows = TAIL_THRESHOLDS
        .iter()
        .map(|&u| {
            let exceed = norms.iter().filter(|&&x| x >= 2.0 + u).count();
            let (wilson_lo, wilson_hi) = wilson_interval(exceed, samples, 1.96);
            TailRow {
                u,
                exceed,
                freq: exceed as f64 / samples as f64,
                wilson_lo,
                wilson_hi,
            }
        })
        .collect();
    Ok(TailReport {
        n,
        samples,
        median,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncalg::{parse_poly, Alphabet, CoeffAlgebra};

    fn diag(vals: &[f64]) -> CMatrix {
        CMatrix::from_fn(vals.len(), vals.len(), |i, j| {
            C64::new(if i == j { vals[i] } else { 0.0 }, 0.0)
        })
    }

    #[test]
    fn free_side_values() {
        let x = parse_poly("X1", Alphabet::semicircular(1), CoeffAlgebra::Scalar).unwrap();
        let f = free_side_norm(&x, &[], 1e-3).unwrap();
        assert!(f.converged);
        assert!(f.value < 2.0 && 2.0 - f.value < 5e-3, "{f:?}");
        let y = parse_poly("Y1", Alphabet::new(0, 1), CoeffAlgebra::Scalar).unwrap();
        let m = diag(&[0.5, -1.5, 1.0]);
        let f = free_side_norm(&y, &[m], 1e-3).unwrap();
        assert!((f.value - 1.5).abs() < 1e-12);
        let s = parse_poly("X1 + Y1", Alphabet::new(1, 1), CoeffAlgebra::Scalar).unwrap();
        let f = free_side_norm(&s, &[diag(&[1.0, -1.0])], 1e-3).unwrap();
        assert!((f.value - 3.0).abs() < 5e-3, "{f:?}");
    }

    #[test]
    fn pure_deterministic_side_is_exact() {
        let y = parse_poly("Y1", Alphabet::new(0, 1), CoeffAlgebra::Scalar).unwrap();
        let r = strong_convergence_experiment(&y, &[8], &[diag(&[2.0, -0.5])], 2, 4, 1).unwrap();
        assert!((r.rows[0].mean_norm - 2.0).abs() < 1e-12);
        assert!((r.free.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn dense_and_block_paths_agree_in_law() {
        let one = parse_poly("X1 + Y1", Alphabet::new(1, 1), CoeffAlgebra::Scalar).unwrap();
        let two = one.clone().with_alphabet(Alphabet::new(2, 1)).unwrap();
        let y = [diag(&[1.0, -1.0])];
        let a = strong_convergence_experiment(&one, &[16], &y, 2, 400, 3).unwrap();
        let b = strong_convergence_experiment(&two, &[16], &y, 2, 400, 4).unwrap();
        let (ra, rb) = (&a.rows[0], &b.rows[0]);
        assert!((ra.mean_norm - rb.mean_norm).abs() < 4.0 * (ra.stderr_norm.hypot(rb.stderr_norm)));
        assert!((ra.mean_lp - rb.mean_lp).abs() < 4.0 * (ra.stderr_lp.hypot(rb.stderr_lp)));
    }

    #[test]
    fn tail_frequencies() {
        let r = tail_check(64, 500, 2).unwrap();
        for w in r.rows.windows(2) {
            assert!(w[1].freq <= w[0].freq);
        }
        assert!((r.median - 2.0).abs() < 0.2);
        assert_eq!(r.rows[2].exceed, 0);
        let (lo, hi) = wilson_interval(0, 100, 1.96);
        assert!(lo == 0.0 && hi > 0.0 && hi < 0.05);
        assert!(tail_check(257, 10, 0).is_err());
    }
}
