use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::genus::{gue_exact_mixed_moment, MAX_GENUS_WORD};
use super::sampling::{eval_poly_matrices, sample_gue, sample_gue_spectrum, RngSpec};
use crate::linalg::{pairwise_sum, pairwise_sum_complex};
use crate::ncalg::NcPoly;
use crate::{CMatrix, Error, Result, C64};

pub const MAX_MC_N: usize = 512;
pub const MAX_MC_SAMPLES: usize = 1_000_000;
pub const CSV_HEADER: &str = "key,N,k,exact,mc_mean,mc_stderr,samples,seed";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentRow {
    pub key: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub k: usize,
    pub exact: Option<f64>,
    pub mc_mean: f64,
    pub mc_stderr: f64,
    pub samples: usize,
    pub seed: u64,
    /// Entrywise mean of `id (x) ts_N` for matrix coefficients, as `[re, im]`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mean_matrix: Option<Vec<Vec<[f64; 2]>>>,
}

pub fn rows_to_csv(rows: &[MomentRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let key = if r.key.contains(',') || r.key.contains('"') {
            format!("\"{}\"", r.key.replace('"', "\"\""))
        } else {
            r.key.clone()
        };
        let exact = r.exact.map_or(String::new(), |e| e.to_string());
        out.push_str(&format!(
            "{key},{},{},{exact},{},{},{},{}\n",
            r.n, r.k, r.mc_mean, r.mc_stderr, r.samples, r.seed
        ));
    }
    out
}

fn check_caps(n: usize, samples: usize) -> Result<()> {
    if n == 0 || n > MAX_MC_N {
        return Err(Error::Capacity(format!(
            "N must lie in [1, {MAX_MC_N}], got {n}"
        )));
    }
    if !(2..=MAX_MC_SAMPLES).contains(&samples) {
        return Err(Error::Capacity(format!(
            "samples must lie in [2, {MAX_MC_SAMPLES}], got {samples}"
        )));
    }
    Ok(())
}

fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = pairwise_sum(xs) / n;
    let dev: Vec<f64> = xs.iter().map(|x| (x - mean).powi(2)).collect();
    (mean, (pairwise_sum(&dev) / (n - 1.0) / n).sqrt())
}

/// `(id (x) ts_N)` of a `cN x cN` matrix in `kron(coeff, matrix)` layout.
fn coeff_trace(m: &CMatrix, c: usize) -> CMatrix {
    let n = m.nrows() / c;
    CMatrix::from_fn(c, c, |a, b| {
        (0..n).map(|i| m[(a * n + i, b * n + i)]).sum::<C64>() / C64::new(n as f64, 0.0)
    })
}

fn exact_moment(q: &NcPoly, n: usize) -> Option<f64> {
    if q.algebra().dim() != 1 || q.has_deterministic() {
        return None;
    }
    let mut acc = C64::new(0.0, 0.0);
    for (w, a) in q.terms() {
        let slots = w.x_slots()?;
        if slots.len() > MAX_GENUS_WORD {
            return None;
        }
        acc += a[(0, 0)] * gue_exact_mixed_moment(&slots).ok()?.eval_f64(n as u64);
    }
    Some(acc.re)
}

fn x_only(p: &NcPoly) -> Result<()> {
    if p.has_deterministic() {
        return Err(Error::InvalidInput(
            "Monte Carlo inputs take X letters only".into(),
        ));
    }
    Ok(())
}

/// Mean and standard error of `id (x) ts_N(P^k(X^N))`. The scalar columns
/// carry the real part of the normalized coefficient trace.
pub fn mc_moment(p: &NcPoly, k: usize, n: usize, samples: usize, seed: u64) -> Result<MomentRow> {
    check_caps(n, samples)?;
    x_only(p)?;
    let q = p.pow(k);
    let d = q.alphabet().d;
    let c = q.algebra().dim();
    let values: Vec<CMatrix> = (0..samples as u64)
        .into_par_iter()
        .map(|s| {
            let g = sample_gue(n, d, &mut RngSpec::new(seed, s).rng())?;
            Ok(coeff_trace(&eval_poly_matrices(&q, &g.matrices, &[])?, c))
        })
        .collect::<Result<_>>()?;
    let scalar: Vec<f64> = values.iter().map(|m| m.trace().re / c as f64).collect();
    let (mc_mean, mc_stderr) = mean_stderr(&scalar);
    let mean_matrix = (c > 1).then(|| {
        (0..c)
            .map(|a| {
                (0..c)
                    .map(|b| {
                        let entries: Vec<C64> = values.iter().map(|m| m[(a, b)]).collect();
                        let z = pairwise_sum_complex(&entries) / C64::new(samples as f64, 0.0);
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect()
    });
    Ok(MomentRow {
        key: format!("({p})^{k}"),
        n,
        k,
        exact: exact_moment(&q, n),
        mc_mean,
        mc_stderr,
        samples,
        seed,
        mean_matrix,
    })
}

/// `(tau (x) ts_N)((P^* P)^k)^{1/2k}` of one sample. `P` in the single
/// variable `X1` goes through the GUE spectrum, since the value only
/// depends on it.
pub(crate) fn lp_norm_sample(p: &NcPoly, k: usize, n: usize, spec: RngSpec) -> Result<f64> {
    let c = p.algebra().dim();
    let d = p.alphabet().d;
    let power = |m: &CMatrix| -> C64 {
        let h = m.adjoint() * m;
        let mut acc = h.clone();
        for _ in 1..k {
            acc = &acc * &h;
        }
        acc.trace()
    };
    let total = if d <= 1 && c == 1 {
        // Scalar polynomial in one variable: Horner on the eigenvalues.
        let deg = p.degree().unwrap_or(0);
        let mut coeffs = vec![C64::new(0.0, 0.0); deg + 1];
        for (w, a) in p.terms() {
            coeffs[w.len()] += a[(0, 0)];
        }
        let ev = sample_gue_spectrum(n, &mut spec.rng())?;
        let parts: Vec<f64> = ev
            .iter()
            .map(|&l| {
                let v = coeffs
                    .iter()
                    .rev()
                    .fold(C64::new(0.0, 0.0), |acc, a| acc * l + a);
                v.norm_sqr().powi(k as i32)
            })
            .collect();
        C64::new(pairwise_sum(&parts), 0.0)
    } else if d <= 1 {
        let ev = sample_gue_spectrum(n, &mut spec.rng())?;
        let parts = ev
            .iter()
            .map(|&l| {
                Ok(power(&eval_poly_matrices(
                    p,
                    &[CMatrix::from_element(1, 1, C64::new(l, 0.0))],
                    &[],
                )?))
            })
            .collect::<Result<Vec<C64>>>()?;
        pairwise_sum_complex(&parts)
    } else {
        let g = sample_gue(n, d, &mut spec.rng())?;
        power(&eval_poly_matrices(p, &g.matrices, &[])?)
    };
    Ok((total.re / (c * n) as f64)
        .max(0.0)
        .powf(1.0 / (2 * k) as f64))
}

/// Mean and standard error of `||P(X^N)||_{L^{2k}}`.
pub fn mc_lp_norm(p: &NcPoly, k: usize, n: usize, samples: usize, seed: u64) -> Result<MomentRow> {
    check_caps(n, samples)?;
    x_only(p)?;
    if k == 0 {
        return Err(Error::InvalidInput("k must be positive".into()));
    }
    let values: Vec<f64> = (0..samples as u64)
        .into_par_iter()
        .map(|s| lp_norm_sample(p, k, n, RngSpec::new(seed, s)))
        .collect::<Result<_>>()?;
    let (mc_mean, mc_stderr) = mean_stderr(&values);
    Ok(MomentRow {
        key: format!("L{}:{p}", 2 * k),
        n,
        k,
        exact: None,
        mc_mean,
        mc_stderr,
        samples,
        seed,
        mean_matrix: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncalg::{parse_poly, Alphabet, CoeffAlgebra};

    fn x1() -> NcPoly {
        parse_poly("X1", Alphabet::semicircular(1), CoeffAlgebra::Scalar).unwrap()
    }

    #[test]
    fn odd_and_even_moments() {
        let r = mc_moment(&x1(), 1, 32, 2000, 1).unwrap();
        assert!(r.mc_mean.abs() < 4.0 * r.mc_stderr);
        assert_eq!(r.exact, Some(0.0));
        let r = mc_moment(&x1(), 2, 32, 2000, 1).unwrap();
        assert!((r.mc_mean - 1.0).abs() < 4.0 * r.mc_stderr);
        let r = mc_moment(&x1(), 4, 32, 2000, 2).unwrap();
        let exact = 2.0 + 1.0 / 1024.0;
        assert!((r.exact.unwrap() - exact).abs() < 1e-14);
        assert!((r.mc_mean - exact).abs() < 4.0 * r.mc_stderr);
    }

    #[test]
    fn mixed_words_and_matrix_coefficients() {
        let ab = Alphabet::semicircular(2);
        let p = parse_poly("X1*X2*X1*X2 + X1^2*X2^2", ab, CoeffAlgebra::Scalar).unwrap();
        let r = mc_moment(&p, 1, 16, 2000, 4).unwrap();
        let exact = r.exact.unwrap();
        assert!((exact - (1.0 + 1.0 / 256.0)).abs() < 1e-14);
        assert!((r.mc_mean - exact).abs() < 4.0 * r.mc_stderr);
        let a = CMatrix::from_fn(2, 2, |i, j| C64::new((i + 2 * j) as f64, 0.0));
        let q = NcPoly::monomial(ab, a.clone(), crate::ncalg::Word::from_x(&[1, 1])).unwrap();
        let r = mc_moment(&q, 1, 8, 500, 5).unwrap();
        let m = r.mean_matrix.unwrap();
        assert!((m[1][0][0] - 1.0).abs() < 0.2);
        assert_eq!(r.exact, None);
    }

    #[test]
    fn lp_norm_paths_agree() {
        // Same law through the spectrum and through dense sampling.
        let one = mc_lp_norm(&x1(), 2, 24, 3000, 1).unwrap();
        let two = parse_poly("X1", Alphabet::semicircular(2), CoeffAlgebra::Scalar).unwrap();
        let dense = mc_lp_norm(&two, 2, 24, 3000, 2).unwrap();
        let se = (one.mc_stderr.powi(2) + dense.mc_stderr.powi(2)).sqrt();
        assert!((one.mc_mean - dense.mc_mean).abs() < 4.0 * se);
        assert!((one.mc_mean - (2.0f64 + 1.0 / 576.0).powf(0.25)).abs() < 0.01);
    }

    #[test]
    fn scalar_shortcut_matches_block_path() {
        let ab = Alphabet::semicircular(1);
        let p = parse_poly("X1^3 - 2*X1 + 0.5i", ab, CoeffAlgebra::Scalar).unwrap();
        let id = CMatrix::identity(2, 2);
        let mut q = NcPoly::zero(ab, CoeffAlgebra::Matrix(2));
        for (w, a) in p.terms() {
            q.add_term(w.clone(), &id * a[(0, 0)]).unwrap();
        }
        for s in 0..5 {
            let a = lp_norm_sample(&p, 3, 10, RngSpec::new(8, s)).unwrap();
            let b = lp_norm_sample(&q, 3, 10, RngSpec::new(8, s)).unwrap();
            assert!((a - b).abs() < 1e-12 * a);
        }
    }

    #[test]
    fn caps_and_csv() {
        assert!(mc_moment(&x1(), 1, 513, 10, 0).is_err());
        assert!(mc_moment(&x1(), 1, 8, 1_000_001, 0).is_err());
        let r = mc_moment(&x1(), 2, 4, 10, 0).unwrap();
        let csv = rows_to_csv(&[r]);
        assert!(csv.starts_with(CSV_HEADER));
        assert_eq!(csv.lines().nth(1).unwrap().split(',').count(), 8);
    }
}
