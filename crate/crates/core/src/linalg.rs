//! Dense spectral helpers: operator norms, Hermitian spectra, the implicit
//! QL iteration for symmetric tridiagonal matrices, and pairwise summation.

use nalgebra::DVector;

use crate::{CMatrix, Error, Result, C64};

/// Dimensions up to this use a dense decomposition; above, Lanczos on `A^*A`
/// with a sparse product.
pub const DENSE_NORM_LIMIT: usize = 192;
pub const LANCZOS_MAX_ITER: usize = 600;
const LANCZOS_RESIDUAL: f64 = 1e-12;

pub fn is_hermitian(a: &CMatrix, tol: f64) -> bool {
    a.is_square()
        && (0..a.nrows()).all(|i| (0..=i).all(|j| (a[(i, j)] - a[(j, i)].conj()).norm() <= tol))
}

/// Largest singular value.
pub fn op_norm(a: &CMatrix) -> Result<f64> {
    if a.is_empty() {
        return Ok(0.0);
    }
    if a.nrows().max(a.ncols()) <= DENSE_NORM_LIMIT {
        if is_hermitian(a, 0.0) {
            let ev = a.clone().symmetric_eigenvalues();
            return Ok(ev.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        }
        let sv = a.singular_values();
        return Ok(sv.iter().fold(0.0f64, |m, v| m.max(*v)));
    }
    let sparse = Csr::from_dense(a);
    let adj = Csr::from_dense(&a.adjoint());
    lanczos_norm(a.ncols(), |v| sparse.apply(v), |v| adj.apply(v))
}

struct Csr {
    rows: usize,
    start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl Csr {
    fn from_dense(a: &CMatrix) -> Self {
        let mut start = vec![0];
        let (mut cols, mut vals) = (Vec::new(), Vec::new());
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                let z = a[(i, j)];
                if z != C64::new(0.0, 0.0) {
                    cols.push(j);
                    vals.push(z);
                }
            }
            start.push(cols.len());
        }
        Csr {
            rows: a.nrows(),
            start,
            cols,
            vals,
        }
    }

    fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        DVector::from_fn(self.rows, |i, _| {
            (self.start[i]..self.start[i + 1])
                .map(|k| self.vals[k] * v[self.cols[k]])
                .sum()
        })
    }
}

/// Spectral norm of a matrix-free operator: Lanczos with full
/// reorthogonalization on `T^*T`, stopped on the Ritz residual.
pub fn lanczos_norm<F, G>(dim: usize, apply: F, apply_adjoint: G) -> Result<f64>
where
    F: Fn(&DVector<C64>) -> DVector<C64>,
    G: Fn(&DVector<C64>) -> DVector<C64>,
{
    if dim == 0 {
        return Ok(0.0);
    }
    let mut q = DVector::from_fn(dim, |i, _| {
        C64::new(1.0 + (i % 7) as f64 * 0.1, 0.05 * (i % 3) as f64)
    });
    q /= C64::new(q.norm(), 0.0);
    let mut basis: Vec<DVector<C64>> = Vec::new();
    let (mut alphas, mut betas) = (Vec::<f64>::new(), Vec::<f64>::new());
    let limit = dim.min(LANCZOS_MAX_ITER);
    let top = |alphas: &[f64], betas: &[f64]| -> (f64, f64) {
        let k = alphas.len();
        let t = nalgebra::DMatrix::<f64>::from_fn(k, k, |i, j| {
            if i == j {
                alphas[i]
            } else if i + 1 == j || j + 1 == i {
                betas[i.min(j)]
            } else {
                0.0
            }
        });
        let eig = t.symmetric_eigen();
        let (idx, theta) =
            eig.eigenvalues
                .iter()
                .enumerate()
                .fold(
                    (0, f64::NEG_INFINITY),
                    |b, (i, &v)| {
                        if v > b.1 {
                            (i, v)
                        } else {
                            b
                        }
                    },
                );
        (theta, eig.eigenvectors[(k - 1, idx)].abs())
    };
    loop {
        let mut w = apply_adjoint(&apply(&q));
        let alpha = q.dotc(&w).re;
        basis.push(q.clone());
        // Two passes of Gram-Schmidt against the whole basis.
        for _ in 0..2 {
            for b in &basis {
                let c = b.dotc(&w);
                w -= b * c;
            }
        }
        alphas.push(alpha);
        let beta = w.norm();
        let k = alphas.len();
        let scale = alphas
            .iter()
            .fold(0.0f64, |m, a| m.max(a.abs()))
            .max(f64::MIN_POSITIVE);
        let exhausted = beta <= 1e-14 * scale || k == dim;
        if exhausted || k % 5 == 0 || k == limit {
            let (theta, last) = top(&alphas, &betas);
            if theta <= 0.0 && exhausted {
                return Ok(0.0);
            }
            if exhausted || beta * last <= LANCZOS_RESIDUAL * theta {
                return Ok(theta.max(0.0).sqrt());
            }
            if k == limit {
                return Err(Error::NoConvergence {
                    iterations: k,
                    msg: "Lanczos for the spectral norm".into(),
                });
            }
        }
        betas.push(beta);
        q = w / C64::new(beta, 0.0);
    }
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = a.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|x, y| x.total_cmp(y));
    ev
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `diag` and
/// sub-diagonal `off` (length `n - 1`), ascending. Implicit QL with Wilkinson
/// shifts, eigenvalues only.
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if off.len() + 1 != n {
        return Err(Error::DimensionMismatch(
            "sub-diagonal must have length n - 1".into(),
        ));
    }
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NoConvergence {
                    iterations: iter,
                    msg: "tridiagonal QL".into(),
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(|x, y| x.total_cmp(y));
    Ok(d)
}

/// Sum in a fixed binary tree so results do not depend on how the inputs
/// were produced or scheduled.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n => pairwise_sum(&xs[..n / 2]) + pairwise_sum(&xs[n / 2..]),
    }
}

pub fn pairwise_sum_complex(xs: &[C64]) -> C64 {
    match xs.len() {
        0 => C64::new(0.0, 0.0),
        1 => xs[0],
        n => pairwise_sum_complex(&xs[..n / 2]) + pairwise_sum_complex(&xs[n / 2..]),
    }
}

/// Kronecker product.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}
