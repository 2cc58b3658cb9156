use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::linalg::tridiagonal_eigenvalues;
use crate::ncalg::{GenKind, Generator, NcPoly};
use crate::{CMatrix, Error, Result, C64};

/// Seed plus stream: each Monte Carlo sample gets its own ChaCha stream, so
/// results do not depend on scheduling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngSpec {
    pub seed: u64,
    pub stream: u64,
}

impl RngSpec {
    pub fn new(seed: u64, stream: u64) -> Self {
        RngSpec { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(self.stream);
        r
    }
}

#[derive(Clone, Debug)]
pub struct GueSample {
    pub n: usize,
    pub matrices: Vec<CMatrix>,
}

fn gue<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let diag = (1.0 / n as f64).sqrt();
    let off = (1.0 / (2.0 * n as f64)).sqrt();
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        let g: f64 = StandardNormal.sample(rng);
        m[(i, i)] = C64::new(diag * g, 0.0);
        for j in i + 1..n {
            let (re, im): (f64, f64) = (StandardNormal.sample(rng), StandardNormal.sample(rng));
            let z = C64::new(off * re, off * im);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

/// `d` independent `N x N` GUE matrices normalized so that `E ts_N(X^2) = 1`.
pub fn sample_gue<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Result<GueSample> {
    if n == 0 {
        return Err(Error::InvalidInput("matrix size must be positive".into()));
    }
    Ok(GueSample {
        n,
        matrices: (0..d).map(|_| gue(n, rng)).collect(),
    })
}

/// Eigenvalues of one `N x N` GUE matrix (same normalization), via the
/// tridiagonal model with the same spectral law: diagonal `N(0, 1)`,
/// sub-diagonal `chi_{2(N-1)}, .., chi_2` over `sqrt 2`, all scaled by `1/sqrt N`.
pub fn sample_gue_spectrum<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidInput("matrix size must be positive".into()));
    }
    let s = 1.0 / (n as f64).sqrt();
    let diag: Vec<f64> = (0..n)
        .map(|_| {
            let g: f64 = StandardNormal.sample(rng);
            s * g
        })
        .collect();
    let off = (1..n)
        .rev()
        .map(|k| {
            let chi2 =
                ChiSquared::new(2.0 * k as f64).map_err(|e| Error::InvalidInput(e.to_string()))?;
            Ok(s * (chi2.sample(rng) / 2.0).sqrt())
        })
        .collect::<Result<Vec<f64>>>()?;
    tridiagonal_eigenvalues(&diag, &off)
}

/// Haar unitary: QR of a complex Ginibre matrix, with the columns of `Q`
/// rotated by the phases of `diag R`.
pub fn sample_haar<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<CMatrix> {
    if n == 0 {
        return Err(Error::InvalidInput("matrix size must be positive".into()));
    }
    let g = CMatrix::from_fn(n, n, |_, _| {
        let (re, im): (f64, f64) = (StandardNormal.sample(rng), StandardNormal.sample(rng));
        C64::new(re, im)
    });
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    Ok(q)
}

/// `sum a_M (x) M(xs, zs)`, block layout `kron(coeff, matrix)`.
pub fn eval_poly_matrices(p: &NcPoly, xs: &[CMatrix], zs: &[CMatrix]) -> Result<CMatrix> {
    let n = xs.first().or(zs.first()).map(|m| m.nrows());
    let gens = p.generators();
    let n = match n {
        Some(n) => n,
        None if gens.is_empty() => 1,
        None => return Err(Error::InvalidInput("no matrices assigned".into())),
    };
    if xs
        .iter()
        .chain(zs)
        .any(|m| m.nrows() != n || m.ncols() != n)
    {
        return Err(Error::DimensionMismatch(
            "all assigned matrices must share one square size".into(),
        ));
    }
    let lookup = |g: &Generator| -> Result<&CMatrix> {
        let pool = match g.kind {
            GenKind::Semicircular => xs,
            GenKind::Deterministic => zs,
        };
        pool.get(g.index - 1)
            .ok_or_else(|| Error::InvalidInput(format!("generator {g} is unassigned")))
    };
    for g in &gens {
        lookup(g)?;
    }
    let c = p.algebra().dim();
    let mut out = CMatrix::zeros(c * n, c * n);
    // Shared prefixes are multiplied once.
    let terms: Vec<_> = p.terms().collect();
    let mut cache: Vec<(Vec<Generator>, CMatrix)> = Vec::new();
    for (w, a) in terms {
        let letters = w.letters();
        let mut keep = 0;
        while keep < cache.len()
            && keep < letters.len()
            && cache[keep].0.last() == Some(&letters[keep])
        {
            keep += 1;
        }
        cache.truncate(keep);
        for t in keep..letters.len() {
            let next = match cache.last() {
                Some((_, m)) => m * lookup(&letters[t])?,
                None => lookup(&letters[t])?.clone(),
            };
            cache.push((letters[..=t].to_vec(), next));
        }
        let m = match cache.get(letters.len().wrapping_sub(1)) {
            Some((_, m)) if !letters.is_empty() => m.clone(),
            _ => CMatrix::identity(n, n),
        };
        out += a.kronecker(&m);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncalg::{parse_poly, Alphabet, CoeffAlgebra, Word};

    fn ts(m: &CMatrix) -> C64 {
        m.trace() / C64::new(m.nrows() as f64, 0.0)
    }

    fn mean_se(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
        (m, (v / n).sqrt())
    }

    #[test]
    fn gue_is_hermitian_and_reproducible() {
        let a = sample_gue(20, 2, &mut RngSpec::new(5, 3).rng()).unwrap();
        let b = sample_gue(20, 2, &mut RngSpec::new(5, 3).rng()).unwrap();
        let c = sample_gue(20, 2, &mut RngSpec::new(5, 4).rng()).unwrap();
        assert_eq!(a.matrices, b.matrices);
        assert_ne!(a.matrices, c.matrices);
        for m in &a.matrices {
            assert!((m - m.adjoint()).norm() < 1e-14);
        }
    }

    #[test]
    fn gue_low_moments() {
        let (n, samples) = (16, 4000);
        let mut second = Vec::new();
        let mut first = Vec::new();
        for s in 0..samples {
            let x = &sample_gue(n, 1, &mut RngSpec::new(1, s).rng())
                .unwrap()
                .matrices[0];
            second.push(ts(&(x * x)).re);
            first.push(ts(x).re);
        }
        let (m2, se2) = mean_se(&second);
        assert!((m2 - 1.0).abs() < 4.0 * se2, "{m2} {se2}");
        let (m1, se1) = mean_se(&first);
        assert!(m1.abs() < 4.0 * se1);
        // Var ts(X) = 1/N^2.
        let var = first.iter().map(|x| x * x).sum::<f64>() / samples as f64;
        assert!((var * (n * n) as f64 - 1.0).abs() < 0.1);
    }

    #[test]
    fn tridiagonal_model_matches_dense_fourth_moment() {
        let (n, samples) = (12, 6000);
        let mut dense = Vec::new();
        let mut tri = Vec::new();
        for s in 0..samples {
            let x = &sample_gue(n, 1, &mut RngSpec::new(2, s).rng())
                .unwrap()
                .matrices[0];
            let x2 = x * x;
            dense.push(ts(&(&x2 * &x2)).re);
            let ev = sample_gue_spectrum(n, &mut RngSpec::new(3, s).rng()).unwrap();
            tri.push(ev.iter().map(|l| l.powi(4)).sum::<f64>() / n as f64);
        }
        let exact = 2.0 + 1.0 / (n * n) as f64;
        let (a, sa) = mean_se(&dense);
        let (b, sb) = mean_se(&tri);
        assert!((a - exact).abs() < 4.0 * sa, "{a} {sa}");
        assert!((b - exact).abs() < 4.0 * sb, "{b} {sb}");
    }

    #[test]
    fn haar_unitary_and_moments() {
        let n = 32;
        let mut tr = Vec::new();
        let mut abs2 = Vec::new();
        for s in 0..3000 {
            let u = sample_haar(n, &mut RngSpec::new(9, s).rng()).unwrap();
            if s < 5 {
                assert!((u.adjoint() * &u - CMatrix::identity(n, n)).norm() < 1e-12);
            }
            let t = u.trace();
            tr.push(t.re / n as f64);
            abs2.push(t.norm_sqr());
        }
        let (m, se) = mean_se(&tr);
        assert!(m.abs() < 4.0 * se);
        let (m, se) = mean_se(&abs2);
        assert!((m - 1.0).abs() < 4.0 * se, "{m} {se}");
    }

    #[test]
    fn matrix_evaluation() {
        let mut r = RngSpec::new(0, 0).rng();
        let g = sample_gue(4, 2, &mut r).unwrap().matrices;
        let ab = Alphabet::new(2, 1);
        let x1 = parse_poly("X1", ab, CoeffAlgebra::Scalar).unwrap();
        assert_eq!(eval_poly_matrices(&x1, &g, &[]).unwrap(), g[0]);
        let p = parse_poly("X1*X2 + X1*X2*X1 - 2*Z1 + 3", ab, CoeffAlgebra::Scalar).unwrap();
        let z = CMatrix::from_fn(4, 4, |i, j| C64::new(i as f64, j as f64));
        let manual = &g[0] * &g[1] + &g[0] * &g[1] * &g[0] - &z * C64::new(2.0, 0.0)
            + CMatrix::identity(4, 4) * C64::new(3.0, 0.0);
        assert!(
            (eval_poly_matrices(&p, &g, std::slice::from_ref(&z)).unwrap() - manual).norm() < 1e-12
        );
        let a = CMatrix::from_fn(3, 3, |i, j| C64::new((i + j) as f64, 0.0));
        let q = NcPoly::monomial(ab, a.clone(), Word::from_x(&[2])).unwrap();
        let e = eval_poly_matrices(&q, &g, &[z]).unwrap();
        assert_eq!(e.shape(), (12, 12));
        assert_eq!(e, a.kronecker(&g[1]));
        assert!(
            eval_poly_matrices(&x1, &[CMatrix::zeros(2, 2), CMatrix::zeros(3, 3)], &[]).is_err()
        );
    }
}
