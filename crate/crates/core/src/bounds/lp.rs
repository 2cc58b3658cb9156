use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Optimum of `max sum alpha_{i,j} s_{i,j}` over `alpha >= 0`,
/// `sum_i alpha_{i,j} = 1` for each `j` and `sum i alpha_{i,j} <= budget`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub value: f64,
    /// Weights aligned with the candidate lists.
    pub weights: Vec<Vec<f64>>,
    /// Budget multiplier at the optimum (0 when the budget is slack).
    pub lambda: f64,
}

const TIE_TOL: f64 = 1e-10;
const BISECTION_STEPS: usize = 200;

fn picks(cands: &[Vec<(usize, f64)>], lambda: f64) -> Vec<(usize, usize)> {
    // (lowest-order maximizer, highest-order maximizer) per row.
    cands
        .iter()
        .map(|row| {
            let best = row
                .iter()
                .map(|&(i, s)| s - lambda * i as f64)
                .fold(f64::NEG_INFINITY, f64::max);
            let tied = |&(t, &(i, s)): &(usize, &(usize, f64))| {
                (s - lambda * i as f64 >= best - TIE_TOL * (1.0 + best.abs())).then_some((i, t))
            };
            let lo = row
                .iter()
                .enumerate()
                .filter_map(|e| tied(&e))
                .min()
                .unwrap()
                .1;
            let hi = row
                .iter()
                .enumerate()
                .filter_map(|e| tied(&e))
                .max()
                .unwrap()
                .1;
            (lo, hi)
        })
        .collect()
}

/// Dual search on the budget multiplier. Every row picks its maximizer of
/// `s - lambda i`; `lambda` is bisected until the budget is met and the
/// tied rows at the critical multiplier are split to use it exactly.
pub fn lp_optimum(cands: &[Vec<(usize, f64)>], budget: f64) -> Result<LpSolution> {
    if cands.iter().any(Vec::is_empty) || cands.iter().flatten().any(|(_, s)| !s.is_finite()) {
        return Err(Error::InvalidInput(
            "every row needs a finite candidate".into(),
        ));
    }
    let spend = |p: &[(usize, usize)], high: bool| -> f64 {
        p.iter()
            .zip(cands)
            .map(|(&(lo, hi), row)| row[if high { hi } else { lo }].0 as f64)
            .sum()
    };
    let solution = |lambda: f64, p: Vec<(usize, usize)>| {
        let mut weights: Vec<Vec<f64>> = cands.iter().map(|r| vec![0.0; r.len()]).collect();
        let mut left = budget - spend(&p, false);
        for (j, &(lo, hi)) in p.iter().enumerate() {
            let (ilo, ihi) = (cands[j][lo].0 as f64, cands[j][hi].0 as f64);
            let t = if ihi > ilo {
                (left / (ihi - ilo)).clamp(0.0, 1.0)
            } else {
                0.0
            };
            left -= t * (ihi - ilo);
            weights[j][lo] += 1.0 - t;
            weights[j][hi] += t;
        }
        let value = weights
            .iter()
            .zip(cands)
            .flat_map(|(w, r)| w.iter().zip(r).map(|(a, &(_, s))| a * s))
            .sum();
        LpSolution {
            value,
            weights,
            lambda,
        }
    };

    let free = picks(cands, 0.0);
    if spend(&free, false) <= budget {
        return Ok(solution(0.0, free));
    }
    let mut breakpoints = Vec::new();
    for row in cands {
        for &(a, sa) in row {
            for &(b, sb) in row {
                if a > b {
                    breakpoints.push((sa - sb) / (a - b) as f64);
                }
            }
        }
    }
    let mut hi = breakpoints.iter().copied().fold(0.0, f64::max) + 1.0;
    if spend(&picks(cands, hi), false) > budget {
        return Err(Error::InvalidInput(format!(
            "no weights satisfy the budget {budget}"
        )));
    }
    let mut lo = 0.0;
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if spend(&picks(cands, mid), false) <= budget {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    // The spend only changes at breakpoints, so the critical multiplier is one.
    let lambda = breakpoints
        .iter()
        .copied()
        .filter(|b| *b > 0.0)
        .min_by(|a, b| (a - hi).abs().total_cmp(&(b - hi).abs()))
        .unwrap_or(hi);
    let p = picks(cands, lambda);
    if spend(&p, false) > budget + 1e-9 || spend(&p, true) < budget - 1e-9 {
        return Err(Error::NoConvergence {
            iterations: BISECTION_STEPS,
            msg: "budget multiplier not bracketed".into(),
        });
    }
    Ok(solution(lambda, p))
}

/// Exhaustive vertex enumeration of the same program: every vertex has at
/// most one row split between two candidates.
pub fn brute_force_lp(cands: &[Vec<(usize, f64)>], budget: f64) -> Option<f64> {
    let n = cands.len();
    if cands.iter().any(Vec::is_empty) {
        return None;
    }
    let mut best: Option<f64> = None;
    let mut idx = vec![0usize; n];
    loop {
        let spent: f64 = (0..n).map(|j| cands[j][idx[j]].0 as f64).sum();
        let value: f64 = (0..n).map(|j| cands[j][idx[j]].1).sum();
        if spent <= budget + 1e-12 {
            best = Some(best.map_or(value, |b: f64| b.max(value)));
        }
        for j in 0..n {
            let (ij, sj) = cands[j][idx[j]];
            for &(b, sb) in &cands[j] {
                if b > ij {
                    let t = (budget - spent) / (b - ij) as f64;
                    if t > 0.0 && t < 1.0 {
                        let v = value + t * (sb - sj);
                        best = Some(best.map_or(v, |x: f64| x.max(v)));
                    }
                }
            }
        }
        let mut t = 0;
        while t < n {
            idx[t] += 1;
            if idx[t] < cands[t].len() {
                break;
            }
            idx[t] = 0;
            t += 1;
        }
        if t == n {
            return best;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RhsReport {
    pub rhs: f64,
    /// `ln rhs`; `-inf` for a zero factor.
    pub log_rhs: f64,
    /// `alpha[j][i]`.
    pub alpha: Vec<Vec<f64>>,
    pub lambda: f64,
}

/// `(80e)^n d^{3n} exp(max sum alpha_{i,j} ln S_{i,j})` with the order budget `3n`.
/// `profiles[j][i]` is `S_{i,j}`; zero entries are not candidates.
pub fn masterineq_rhs(profiles: &[Vec<f64>], d: usize) -> Result<RhsReport> {
    let n = profiles.len();
    if n == 0 || d == 0 {
        return Err(Error::InvalidInput(
            "need at least one profile and d >= 1".into(),
        ));
    }
    if profiles
        .iter()
        .flatten()
        .any(|s| !s.is_finite() || *s < 0.0)
    {
        return Err(Error::InvalidInput(
            "profile values must be finite and nonnegative".into(),
        ));
    }
    let zero_alpha = || profiles.iter().map(|r| vec![0.0; r.len()]).collect();
    if profiles.iter().any(|r| r.iter().all(|s| *s == 0.0)) {
        return Ok(RhsReport {
            rhs: 0.0,
            log_rhs: f64::NEG_INFINITY,
            alpha: zero_alpha(),
            lambda: 0.0,
        });
    }
    let cands: Vec<Vec<(usize, f64)>> = profiles
        .iter()
        .map(|r| {
            r.iter()
                .enumerate()
                .filter(|(_, s)| **s > 0.0)
                .map(|(i, s)| (i, s.ln()))
                .collect()
        })
        .collect();
    let sol = lp_optimum(&cands, 3.0 * n as f64)?;
    let mut alpha: Vec<Vec<f64>> = zero_alpha();
    for (j, row) in cands.iter().enumerate() {
        for (t, &(i, _)) in row.iter().enumerate() {
            alpha[j][i] = sol.weights[j][t];
        }
    }
    let log_rhs =
        n as f64 * (80.0 * std::f64::consts::E).ln() + 3.0 * n as f64 * (d as f64).ln() + sol.value;
    Ok(RhsReport {
        rhs: log_rhs.exp(),
        log_rhs,
        alpha,
        lambda: sol.lambda,
    })
}
