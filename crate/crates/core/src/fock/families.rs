use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use super::basis::{build_basis, FockBasis};
use super::operator::{semicircular_op, FockOperator};
use super::vector::BaseVector;
use crate::{Error, Result, C64};

const SYM_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;

/// Correlation matrix of `n` semicircular families: symmetric, PSD, unit
/// diagonal. Families `i, j` satisfy `tau(x^i_u x^j_v) = [u = v] kappa_ij`.
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceSpec {
    kappa: DMatrix<f64>,
}

impl CovarianceSpec {
    pub fn new(kappa: DMatrix<f64>) -> Result<Self> {
        let n = kappa.nrows();
        if !kappa.is_square() {
            return Err(Error::InvalidInput("covariance must be square".into()));
        }
        for i in 0..n {
            if (kappa[(i, i)] - 1.0).abs() > SYM_TOL {
                return Err(Error::InvalidInput(format!(
                    "kappa[{i}][{i}] = {} is not 1",
                    kappa[(i, i)]
                )));
            }
            for j in 0..n {
                if (kappa[(i, j)] - kappa[(j, i)]).abs() > SYM_TOL {
                    return Err(Error::InvalidInput("covariance must be symmetric".into()));
                }
                if kappa[(i, j)].abs() > 1.0 + SYM_TOL {
                    return Err(Error::InvalidInput(
                        "covariance entries must lie in [-1, 1]".into(),
                    ));
                }
            }
        }
        let min = kappa.clone().symmetric_eigenvalues().min();
        if n > 0 && min < -PSD_TOL {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
            });
        }
        Ok(CovarianceSpec { kappa })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput(
                "covariance rows must have equal length".into(),
            ));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn identity(n: usize) -> Self {
        CovarianceSpec {
            kappa: DMatrix::identity(n, n),
        }
    }

    /// Random correlation matrix `D^{-1/2} G G^T D^{-1/2}` with Gaussian `G`.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let g = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
        let c = &g * g.transpose();
        let kappa = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                1.0
            } else {
                c[(i, j)] / (c[(i, i)] * c[(j, j)]).sqrt()
            }
        });
        CovarianceSpec { kappa }
    }

    pub fn n(&self) -> usize {
        self.kappa.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.kappa[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.kappa
    }

    /// `F` with `F F^T = kappa`, from the eigendecomposition with tiny
    /// negative eigenvalues clipped; columns for null directions are dropped.
    pub fn factor(&self) -> DMatrix<f64> {
        let n = self.n();
        let eig = self.kappa.clone().symmetric_eigen();
        let keep: Vec<usize> = (0..n).filter(|&k| eig.eigenvalues[k] > SYM_TOL).collect();
        DMatrix::from_fn(n, keep.len().max(1), |i, s| match keep.get(s) {
            Some(&k) => eig.eigenvectors[(i, k)] * eig.eigenvalues[k].sqrt(),
            None => 0.0,
        })
    }
}

/// Base vectors `xi^i_u = e_u (x) F_i` in `C^d (x) C^r`, so that
/// `<xi^i_u, xi^j_v> = [u = v] kappa_ij`.
#[derive(Clone, Debug)]
pub struct GramVectors {
    pub covariance: CovarianceSpec,
    pub d: usize,
    pub rank: usize,
    /// `xi[i][u]`, both 0-based.
    pub xi: Vec<Vec<BaseVector>>,
}

impl GramVectors {
    pub fn new(covariance: &CovarianceSpec, d: usize) -> Self {
        let f = covariance.factor();
        let r = f.ncols();
        let m = d * r;
        let xi = (0..covariance.n())
            .map(|i| {
                (0..d)
                    .map(|u| BaseVector {
                        dim: m,
                        entries: (0..r)
                            .filter(|&s| f[(i, s)] != 0.0)
                            .map(|s| (u * r + s, C64::new(f[(i, s)], 0.0)))
                            .collect(),
                    })
                    .collect()
            })
            .collect();
        GramVectors {
            covariance: covariance.clone(),
            d,
            rank: r,
            xi,
        }
    }

    pub fn base_dim(&self) -> usize {
        self.d * self.rank
    }

    pub fn vector(&self, family: usize, slot: usize) -> &BaseVector {
        &self.xi[family][slot]
    }

    /// Largest deviation of the realized Gram matrix from the target.
    pub fn gram_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.covariance.n() {
            for j in 0..self.covariance.n() {
                for u in 0..self.d {
                    for v in 0..self.d {
                        let target = if u == v {
                            self.covariance.get(i, j)
                        } else {
                            0.0
                        };
                        let got = self.xi[i][u].inner(&self.xi[j][v]);
                        worst = worst.max((got - C64::new(target, 0.0)).norm());
                    }
                }
            }
        }
        worst
    }
}

/// Dense operators `x^i_u` on a depth-`depth` truncation, indexed `[i][u]`.
pub fn correlated_families(
    kappa: &CovarianceSpec,
    d: usize,
    depth: usize,
) -> Result<(GramVectors, FockBasis, Vec<Vec<FockOperator>>)> {
    let gram = GramVectors::new(kappa, d);
    let basis = build_basis(gram.base_dim(), depth)?;
    let ops = gram
        .xi
        .iter()
        .map(|fam| {
            fam.iter()
                .map(|xi| semicircular_op(&basis, xi))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((gram, basis, ops))
}
