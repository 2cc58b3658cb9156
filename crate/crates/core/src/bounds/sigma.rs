use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::lp::masterineq_rhs;
use super::profile::{derivative_norm_profile, level_for_budget, ProfileParams};
use crate::fock::{compression, evaluate_poly, Assignment, FreeModel};
use crate::linalg::op_norm;
use crate::ncalg::{NcPoly, Word};
use crate::{CMatrix, Error, Result};

/// A permutation of `[1, n]`, stored as its images.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationSpec {
    images: Vec<usize>,
}

impl PermutationSpec {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n + 1];
        for &v in &images {
            if v == 0 || v > n || std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidInput(format!(
                    "{images:?} is not a permutation of [1,{n}]"
                )));
            }
        }
        Ok(PermutationSpec { images })
    }

    pub fn identity(n: usize) -> Self {
        PermutationSpec {
            images: (1..=n).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    /// `sigma(k)`, 1-based.
    pub fn image(&self, k: usize) -> usize {
        self.images[k - 1]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }
}

/// `m_sigma(P_1 (x) .. (x) P_n) = sum a_{1,M_1} .. a_{n,M_n} (x) M_{sigma(1)} .. M_{sigma(n)}`
/// as a polynomial.
pub fn m_sigma_poly(polys: &[NcPoly], sigma: &PermutationSpec) -> Result<NcPoly> {
    let n = polys.len();
    if sigma.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "permutation of size {} for {n} factors",
            sigma.n()
        )));
    }
    if n == 0 {
        return Err(Error::InvalidInput(
            "m_sigma needs at least one factor".into(),
        ));
    }
    let alg = polys[0].algebra();
    let mut alphabet = polys[0].alphabet();
    for p in polys {
        alg.check_same(&p.algebra())?;
        alphabet = alphabet.union(&p.alphabet());
    }
    let lists: Vec<Vec<(&Word, &CMatrix)>> = polys.iter().map(|p| p.terms().collect()).collect();
    let mut out = NcPoly::zero(alphabet, alg);
    if lists.iter().any(Vec::is_empty) {
        return Ok(out);
    }
    let mut idx = vec![0usize; n];
    loop {
        let mut coeff = alg.identity();
        for j in 0..n {
            coeff *= lists[j][idx[j]].1;
        }
        let mut word = Word::empty();
        for k in 1..=n {
            let j = sigma.image(k) - 1;
            word = word.concat(lists[j][idx[j]].0);
        }
        out.add_term(word, coeff)?;
        let mut t = 0;
        while t < n {
            idx[t] += 1;
            if idx[t] < lists[t].len() {
                break;
            }
            idx[t] = 0;
            t += 1;
        }
        if t == n {
            return Ok(out);
        }
    }
}

/// `m_sigma(Q)(x)` on the dense truncated Fock space of `asg`.
pub fn m_sigma_apply(
    polys: &[NcPoly],
    sigma: &PermutationSpec,
    asg: &Assignment,
) -> Result<CMatrix> {
    evaluate_poly(&m_sigma_poly(polys, sigma)?, asg)
}

/// `m_sigma` on tensors whose factors are sums of simple tensors `a (x) A` of
/// matrices: `sum a_1 .. a_n (x) A_{sigma(1)} .. A_{sigma(n)}`.
pub fn m_sigma_simple(
    factors: &[Vec<(CMatrix, CMatrix)>],
    sigma: &PermutationSpec,
) -> Result<CMatrix> {
    let n = factors.len();
    if sigma.n() != n || n == 0 {
        return Err(Error::DimensionMismatch(
            "permutation size must match the factors".into(),
        ));
    }
    if factors.iter().any(Vec::is_empty) {
        return Err(Error::InvalidInput("empty tensor factor".into()));
    }
    let (ca, cb) = (factors[0][0].0.nrows(), factors[0][0].1.nrows());
    let mut out = CMatrix::zeros(ca * cb, ca * cb);
    let mut idx = vec![0usize; n];
    loop {
        let mut a = CMatrix::identity(ca, ca);
        for j in 0..n {
            a *= &factors[j][idx[j]].0;
        }
        let mut b = CMatrix::identity(cb, cb);
        for k in 1..=n {
            let j = sigma.image(k) - 1;
            b *= &factors[j][idx[j]].1;
        }
        out += a.kronecker(&b);
        let mut t = 0;
        while t < n {
            idx[t] += 1;
            if idx[t] < factors[t].len() {
                break;
            }
            idx[t] = 0;
            t += 1;
        }
        if t == n {
            return Ok(out);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MasterReport {
    pub n: usize,
    pub sigma: Vec<usize>,
    /// Norm of a compression of `m_sigma(Q)(x)`: a lower bound of the norm.
    pub lhs: f64,
    pub rhs: f64,
    /// Nonzero exponents keyed `"i,j"`.
    pub alpha: BTreeMap<String, f64>,
    /// `S[j-1][i]`.
    pub profiles: Vec<Vec<f64>>,
    pub lhs_level: usize,
    pub pass: bool,
}

/// Evaluate both sides of the permuted-product inequality.
pub fn masterineq_check(
    polys: &[NcPoly],
    sigma: &PermutationSpec,
    params: &ProfileParams,
) -> Result<MasterReport> {
    let q = m_sigma_poly(polys, sigma)?;
    if q.has_deterministic() {
        return Err(Error::InvalidInput(
            "inequality check takes X-only polynomials".into(),
        ));
    }
    let d = q.alphabet().d.max(1);
    let model = FreeModel::free(d);
    let total_deg: usize = polys.iter().map(|p| p.degree().unwrap_or(0)).sum();
    let level = level_for_budget(d, 1, q.algebra().dim(), params.dim_budget).min(total_deg.max(1));
    let lhs = op_norm(&compression(&model, &q, level)?)?;
    // Profiles use the common alphabet so every sup runs over the same d.
    let profiles = polys
        .iter()
        .map(|p| {
            let p = p.clone().with_alphabet(q.alphabet())?;
            derivative_norm_profile(&p, params, 3).map(|s| s.values)
        })
        .collect::<Result<Vec<_>>>()?;
    let report = masterineq_rhs(&profiles, d)?;
    let mut alpha = BTreeMap::new();
    for (j, row) in report.alpha.iter().enumerate() {
        for (i, &a) in row.iter().enumerate() {
            if a > 0.0 {
                alpha.insert(format!("{i},{}", j + 1), a);
            }
        }
    }
    Ok(MasterReport {
        n: polys.len(),
        sigma: sigma.images().to_vec(),
        lhs,
        rhs: report.rhs,
        alpha,
        profiles,
        lhs_level: level,
        pass: lhs <= report.rhs + 1e-9,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::build_basis;
    use crate::ncalg::{parse_poly, Alphabet, CoeffAlgebra};
    use crate::C64;

    fn p(s: &str) -> NcPoly {
        parse_poly(s, Alphabet::semicircular(2), CoeffAlgebra::Scalar).unwrap()
    }

    #[test]
    fn identity_permutation_is_the_product() {
        let (a, b) = (p("X1*X2 + 2*X2"), p("X1 - X2^2"));
        let q = m_sigma_poly(&[a.clone(), b.clone()], &PermutationSpec::identity(2)).unwrap();
        assert_eq!(q, a.mul(&b).unwrap());
        let swapped = m_sigma_poly(
            &[a.clone(), b.clone()],
            &PermutationSpec::new(vec![2, 1]).unwrap(),
        )
        .unwrap();
        assert_eq!(swapped, b.mul(&a).unwrap());
        let basis = build_basis(2, 3).unwrap();
        let asg = Assignment::free_semicircular(&basis, 2).unwrap();
        let direct = evaluate_poly(&a.mul(&b).unwrap(), &asg).unwrap();
        assert_eq!(
            m_sigma_apply(&[a, b], &PermutationSpec::identity(2), &asg).unwrap(),
            direct
        );
    }

    #[test]
    fn swap_tensor_identity() {
        let n = 3;
        let e = |i: usize, j: usize| {
            let mut m = CMatrix::zeros(n, n);
            m[(i, j)] = C64::new(1.0, 0.0);
            m
        };
        let u: Vec<(CMatrix, CMatrix)> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (e(i, j), e(j, i)))
            .collect();
        let lhs = m_sigma_simple(
            &[u.clone(), u.clone()],
            &PermutationSpec::new(vec![2, 1]).unwrap(),
        )
        .unwrap();
        let mut uu = CMatrix::zeros(n * n, n * n);
        for (a, b) in &u {
            uu += a.kronecker(b);
        }
        assert!((lhs - uu * C64::new(n as f64, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn permutation_validation() {
        assert!(PermutationSpec::new(vec![1, 1]).is_err());
        assert!(PermutationSpec::new(vec![2, 3]).is_err());
        let q = m_sigma_poly(&[p("X1")], &PermutationSpec::identity(2));
        assert!(q.is_err());
    }

    #[test]
    fn commuting_square() {
        let q = m_sigma_poly(
            &[p("X1"), p("X1")],
            &PermutationSpec::new(vec![2, 1]).unwrap(),
        )
        .unwrap();
        assert_eq!(q, p("X1^2"));
    }
}
