use crate::fock::CovarianceSpec;
use crate::ncalg::{NcPoly, Word};
use crate::{CMatrix, Error, Result, C64};

/// A word in letters `x^i_u`; `family` and `slot` are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FamilyWord {
    pub letters: Vec<(usize, usize)>,
}

impl FamilyWord {
    /// Concatenation `A_1(x^1) .. A_n(x^n)` of X-only monomials.
    pub fn flatten(words: &[Word]) -> Result<Self> {
        let mut letters = Vec::new();
        for (i, w) in words.iter().enumerate() {
            let slots = w.x_slots().ok_or_else(|| {
                Error::InvalidInput(format!("word {w} has deterministic letters"))
            })?;
            letters.extend(slots.into_iter().map(|u| (i + 1, u)));
        }
        Ok(FamilyWord { letters })
    }

    pub fn single_family(slots: &[usize]) -> Self {
        FamilyWord {
            letters: slots.iter().map(|&u| (1, u)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

/// Sum over non-crossing pairings of products of pair covariances, by
/// dynamic programming over intervals: the first letter of an interval pairs
/// with some later letter, splitting the rest into two independent parts.
fn noncrossing_sum(k: usize, weight: impl Fn(usize, usize) -> f64) -> f64 {
    if k % 2 == 1 {
        return 0.0;
    }
    // t[a][b]: value on letters a..b (half-open).
    let mut t = vec![vec![0.0f64; k + 1]; k + 1];
    for (a, row) in t.iter_mut().enumerate() {
        row[a] = 1.0;
    }
    for len in (2..=k).step_by(2) {
        for a in 0..=k - len {
            let b = a + len;
            let mut s = 0.0;
            for j in (a + 1..b).step_by(2) {
                let w = weight(a, j);
                if w != 0.0 {
                    s += w * t[a + 1][j] * t[j + 1][b];
                }
            }
            t[a][b] = s;
        }
    }
    t[0][k]
}

/// `tau(w)` for correlated semicircular families.
pub fn semicircular_trace(w: &FamilyWord, kappa: &CovarianceSpec) -> f64 {
    let l = &w.letters;
    noncrossing_sum(l.len(), |p, q| {
        if l[p].1 == l[q].1 {
            kappa.get(l[p].0 - 1, l[q].0 - 1)
        } else {
            0.0
        }
    })
}

/// `tau(x_{u_1} .. x_{u_k})` for a free semicircular system.
pub fn word_trace(slots: &[usize]) -> f64 {
    noncrossing_sum(
        slots.len(),
        |p, q| if slots[p] == slots[q] { 1.0 } else { 0.0 },
    )
}

fn check_free(p: &NcPoly) -> Result<()> {
    if p.has_deterministic() {
        return Err(Error::InvalidInput(
            "free trace of a polynomial with Z letters".into(),
        ));
    }
    Ok(())
}

/// `tau(P(x))` for a scalar polynomial in a free semicircular system.
pub fn free_trace(p: &NcPoly) -> Result<C64> {
    check_free(p)?;
    if p.algebra().dim() != 1 {
        return Err(Error::AlgebraMismatch(
            "free_trace needs scalar coefficients".into(),
        ));
    }
    Ok(p.terms()
        .map(|(w, c)| c[(0, 0)] * word_trace(&w.x_slots().expect("checked")))
        .sum())
}

/// `(id (x) tau)(P(x))`, coefficient-wise.
pub fn operator_valued_trace(p: &NcPoly) -> Result<CMatrix> {
    check_free(p)?;
    let m = p.algebra().dim();
    let mut out = CMatrix::zeros(m, m);
    for (w, c) in p.terms() {
        let t = word_trace(&w.x_slots().expect("checked"));
        if t != 0.0 {
            out += c * C64::new(t, 0.0);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncalg::{parse_poly, Alphabet, CoeffAlgebra};

    #[test]
    fn catalan_moments() {
        let k = CovarianceSpec::identity(1);
        for (len, c) in [(0usize, 1.0), (2, 1.0), (4, 2.0), (6, 5.0), (3, 0.0)] {
            assert_eq!(
                semicircular_trace(&FamilyWord::single_family(&vec![1; len]), &k),
                c
            );
        }
        assert_eq!(word_trace(&[1, 2, 1, 2]), 0.0);
        assert_eq!(word_trace(&[1, 2, 2, 1]), 1.0);
    }

    #[test]
    fn two_family_pair() {
        let k = CovarianceSpec::from_rows(&[vec![1.0, 0.4], vec![0.4, 1.0]]).unwrap();
        let w = FamilyWord {
            letters: vec![(1, 1), (2, 1)],
        };
        assert!((semicircular_trace(&w, &k) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn polynomial_traces() {
        let ab = Alphabet::semicircular(2);
        let p = parse_poly("(X1+X2)^2", ab, CoeffAlgebra::Scalar).unwrap();
        assert_eq!(free_trace(&p).unwrap(), C64::new(2.0, 0.0));
        let z = parse_poly("Z1", Alphabet::new(2, 1), CoeffAlgebra::Scalar).unwrap();
        assert!(free_trace(&z).is_err());
        let mut a = CMatrix::zeros(2, 2);
        a[(0, 0)] = C64::new(1.0, 0.0);
        a[(1, 1)] = C64::new(2.0, 0.0);
        let q = NcPoly::monomial(ab, a.clone(), Word::from_x(&[1, 1])).unwrap();
        assert_eq!(operator_valued_trace(&q).unwrap(), a);
    }
}
