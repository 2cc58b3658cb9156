use crate::fock::BaseVector;
use crate::fock::{FockBasis, FockVector, Letter};
use crate::ncalg::{Alphabet, CoeffAlgebra, NcPoly, Word};
use crate::{CMatrix, Error, Result};

const RESIDUAL_TOL: f64 = 1e-8;

/// Blocks `<e_M | T (. (x) Omega)>` of an operator on `C^c (x) F_{<=D}`,
/// one `c x c` matrix per Fock basis index.
pub fn vacuum_blocks(t: &CMatrix, c: usize, basis: &FockBasis) -> Result<Vec<CMatrix>> {
    let f = basis.dim();
    if t.nrows() != c * f || t.ncols() != c * f {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, expected {}",
            t.nrows(),
            t.ncols(),
            c * f
        )));
    }
    Ok((0..f)
        .map(|idx| CMatrix::from_fn(c, c, |a, b| t[(a * f + idx, b * f)]))
        .collect())
}

fn word_on_vacuum(m: usize, word: &[usize]) -> FockVector {
    let letters: Vec<Letter> = word
        .iter()
        .map(|&i| Letter::Semicircular(BaseVector::unit(m, i)))
        .collect();
    FockVector::vacuum(m).apply_product(&letters)
}

/// Coefficients of `P` from its evaluation `T = P(x)` on `C^c (x) F_{<=D}`
/// for a free semicircular family on `C^d`, `d = basis.base_dim()`.
///
/// `M(x) Omega` has top component `e_M` and lower components only, so the
/// coefficients are read off level by level from the top degree down.
pub fn coefficient_recovery(
    t: &CMatrix,
    c: usize,
    degree: usize,
    basis: &FockBasis,
) -> Result<NcPoly> {
    if basis.depth() < degree {
        return Err(Error::InvalidInput(format!(
            "depth {} is below the degree bound {degree}",
            basis.depth()
        )));
    }
    let m = basis.base_dim();
    let mut blocks = vacuum_blocks(t, c, basis)?;
    let scale = blocks.iter().map(|b| b.norm()).fold(1.0, f64::max);
    let algebra = if c == 1 {
        CoeffAlgebra::Scalar
    } else {
        CoeffAlgebra::Matrix(c)
    };
    let mut out = NcPoly::zero(Alphabet::semicircular(m), algebra);
    for level in (0..=degree).rev() {
        for idx in basis.level_range(level) {
            let a = blocks[idx].clone();
            if a.iter().all(|z| z.norm() <= 1e-12 * scale) {
                continue;
            }
            let letters = basis.word(idx);
            for (l, pos, z) in word_on_vacuum(m, &letters).entries() {
                let k = basis.level_range(l).start + pos as usize;
                blocks[k] -= &a * z;
            }
            out.add_term(
                Word::from_x(&letters.iter().map(|i| i + 1).collect::<Vec<_>>()),
                a,
            )?;
        }
    }
    let residual = blocks
        .iter()
        .flat_map(|b| b.iter())
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if residual > RESIDUAL_TOL * scale {
        return Err(Error::Consistency(format!(
            "vacuum column not explained by a polynomial of degree {degree}: residual {residual:.3e}"
        )));
    }
    Ok(out)
}

/// Constant `C` with `max_M ||a_M|| <= C ||P(x)||` for degree `<= n` in `d`
/// free semicirculars: `C(n) = 1`, `C(l) = 1 + sum_{j>l} d^j 2^j C(j)`, and
/// the bound is `C(0) = max_l C(l)`.
pub fn recovery_constant(n: usize, d: usize) -> f64 {
    let mut c = vec![0.0; n + 1];
    for l in (0..=n).rev() {
        c[l] = 1.0
            + (l + 1..=n)
                .map(|j| (d as f64 * 2.0).powi(j as i32) * c[j])
                .sum::<f64>();
    }
    c[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{build_basis, compression, evaluate_poly, Assignment, FreeModel};
    use crate::linalg::op_norm;
    use crate::ncalg::parse_poly;
    use crate::testutil::{random_poly, rng};
    use crate::C64;

    #[test]
    fn single_monomial() {
        let basis = build_basis(2, 3).unwrap();
        let a = CMatrix::from_fn(2, 2, |i, j| C64::new(1.0 + i as f64, -(j as f64)));
        let p =
            NcPoly::monomial(Alphabet::semicircular(2), a.clone(), Word::from_x(&[1, 2])).unwrap();
        let t = evaluate_poly(&p, &Assignment::free_semicircular(&basis, 2).unwrap()).unwrap();
        let q = coefficient_recovery(&t, 2, 2, &basis).unwrap();
        assert_eq!(q.len(), 1);
        assert!((q.coefficient(&Word::from_x(&[1, 2])).unwrap() - a).norm() < 1e-12);
    }

    #[test]
    fn depth_must_cover_the_degree() {
        let basis = build_basis(2, 2).unwrap();
        let t = CMatrix::identity(basis.dim(), basis.dim());
        assert!(coefficient_recovery(&t, 1, 3, &basis).is_err());
        // Not a polynomial evaluation: the residual check fires.
        let mut t = CMatrix::zeros(basis.dim(), basis.dim());
        t[(3, 0)] = C64::new(1.0, 0.0);
        t[(0, 0)] = C64::new(0.5, 0.0);
        let p = coefficient_recovery(&t, 1, 1, &basis);
        assert!(p.is_err());
    }

    #[test]
    fn round_trip_and_norm_bound() {
        let mut r = rng(11);
        for _ in 0..10 {
            let p = random_poly(&mut r, 2, CoeffAlgebra::Matrix(2), 3, 6);
            let n = p.degree().unwrap_or(0);
            let basis = build_basis(2, n).unwrap();
            let t = evaluate_poly(&p, &Assignment::free_semicircular(&basis, 2).unwrap()).unwrap();
            let q = coefficient_recovery(&t, 2, n, &basis).unwrap();
            assert!(q.max_abs_diff(&p) < 1e-8);
            let norm = op_norm(&compression(&FreeModel::free(2), &p, n).unwrap()).unwrap();
            let top = p
                .terms()
                .map(|(_, a)| op_norm(a).unwrap())
                .fold(0.0, f64::max);
            assert!(top <= recovery_constant(n, 2) * norm);
        }
        let s = parse_poly("X1*X1 - 1", Alphabet::semicircular(1), CoeffAlgebra::Scalar).unwrap();
        let basis = build_basis(1, 2).unwrap();
        let t = evaluate_poly(&s, &Assignment::free_semicircular(&basis, 1).unwrap()).unwrap();
        assert!(coefficient_recovery(&t, 1, 2, &basis)
            .unwrap()
            .approx_eq(&s, 1e-12));
    }

    #[test]
    fn constant_recursion() {
        assert_eq!(recovery_constant(0, 3), 1.0);
        assert_eq!(recovery_constant(1, 1), 3.0);
        // C(2)=1, C(1)=1+16=17, C(0)=1+4*17+16=85.
        assert_eq!(recovery_constant(2, 2), 85.0);
    }
}
