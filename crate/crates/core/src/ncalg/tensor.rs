use std::collections::BTreeMap;

use super::poly::{is_negligible, CoeffAlgebra, NcPoly};
use super::word::{Alphabet, Word};
use crate::{CMatrix, Error, Result, C64};

/// An element of `A (x) C<X,Z>^{(x) r}`: a finite sum of
/// `a (x) W_1 (x) ... (x) W_r` with the coefficient carried on the left.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorPoly {
    rank: usize,
    alphabet: Alphabet,
    algebra: CoeffAlgebra,
    terms: BTreeMap<Vec<Word>, CMatrix>,
}

impl TensorPoly {
    pub fn zero(rank: usize, alphabet: Alphabet, algebra: CoeffAlgebra) -> Self {
        assert!(rank >= 1, "tensor rank must be positive");
        TensorPoly {
            rank,
            alphabet,
            algebra,
            terms: BTreeMap::new(),
        }
    }

    /// The rank-one tensor with the same terms as `p`.
    pub fn from_poly(p: &NcPoly) -> Self {
        let mut t = TensorPoly::zero(1, p.alphabet(), p.algebra());
        for (w, c) in p.terms() {
            t.terms.insert(vec![w.clone()], c.clone());
        }
        t
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn algebra(&self) -> CoeffAlgebra {
        self.algebra
    }

    /// Number of nonzero terms; see `is_zero`.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[Word], &CMatrix)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn coefficient(&self, slots: &[Word]) -> Option<&CMatrix> {
        self.terms.get(slots)
    }

    pub fn add_term(&mut self, slots: Vec<Word>, coeff: CMatrix) -> Result<()> {
        if slots.len() != self.rank {
            return Err(Error::DimensionMismatch(format!(
                "{} slots in a rank-{} tensor",
                slots.len(),
                self.rank
            )));
        }
        let m = self.algebra.dim();
        if coeff.shape() != (m, m) {
            return Err(Error::AlgebraMismatch(format!(
                "coefficient of shape {:?} in a {m}-dimensional algebra",
                coeff.shape()
            )));
        }
        match self.terms.get_mut(&slots) {
            Some(c) => {
                *c += coeff;
                if is_negligible(c) {
                    self.terms.remove(&slots);
                }
            }
            None => {
                if !is_negligible(&coeff) {
                    self.terms.insert(slots, coeff);
                }
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &TensorPoly) -> Result<TensorPoly> {
        self.same_shape(other)?;
        let mut out = self.clone();
        out.alphabet = self.alphabet.union(&other.alphabet);
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn scale(&self, s: C64) -> TensorPoly {
        let mut out = TensorPoly::zero(self.rank, self.alphabet, self.algebra);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), c * s).expect("same shape");
        }
        out
    }

    /// Merge the last slot of `self` with the first slot of `other`:
    /// `(a (x) A_1..A_r) . (b (x) B_1..B_s) = ab (x) A_1..(A_r B_1)..B_s`.
    pub fn merge(&self, other: &TensorPoly) -> Result<TensorPoly> {
        self.algebra.check_same(&other.algebra)?;
        let mut out = TensorPoly::zero(
            self.rank + other.rank - 1,
            self.alphabet.union(&other.alphabet),
            self.algebra,
        );
        for (k1, c1) in &self.terms {
            for (k2, c2) in &other.terms {
                let mut slots = Vec::with_capacity(out.rank);
                slots.extend_from_slice(&k1[..k1.len() - 1]);
                slots.push(k1[k1.len() - 1].concat(&k2[0]));
                slots.extend_from_slice(&k2[1..]);
                out.add_term(slots, c1 * c2)?;
            }
        }
        Ok(out)
    }

    /// `self . (1 (x) .. (x) Q)`: `Q` multiplies the last slot on the right.
    pub fn mul_right(&self, q: &NcPoly) -> Result<TensorPoly> {
        self.merge(&TensorPoly::from_poly(q))
    }

    /// `(P (x) 1 .. (x) 1) . self`: `P` multiplies the first slot on the left.
    pub fn mul_left(&self, p: &NcPoly) -> Result<TensorPoly> {
        TensorPoly::from_poly(p).merge(self)
    }

    /// Concatenate all slots into a single polynomial.
    pub fn flatten(&self) -> NcPoly {
        let mut p = NcPoly::zero(self.alphabet, self.algebra);
        for (k, c) in &self.terms {
            let w = k.iter().fold(Word::empty(), |acc, s| acc.concat(s));
            p.add_term(w, c.clone()).expect("same shape");
        }
        p
    }

    pub fn max_abs_diff(&self, other: &TensorPoly) -> f64 {
        if self.rank != other.rank || self.algebra.dim() != other.algebra.dim() {
            return f64::INFINITY;
        }
        let m = self.algebra.dim();
        let zero = CMatrix::zeros(m, m);
        let mut worst = 0.0f64;
        for k in self.terms.keys().chain(other.terms.keys()) {
            let a = self.terms.get(k).unwrap_or(&zero);
            let b = other.terms.get(k).unwrap_or(&zero);
            for (x, y) in a.iter().zip(b.iter()) {
                worst = worst.max((x - y).norm());
            }
        }
        worst
    }

    pub fn approx_eq(&self, other: &TensorPoly, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    fn same_shape(&self, other: &TensorPoly) -> Result<()> {
        self.algebra.check_same(&other.algebra)?;
        if self.rank != other.rank {
            return Err(Error::DimensionMismatch(format!(
                "tensor ranks {} and {}",
                self.rank, other.rank
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_joins_adjacent_slots() {
        let ab = Alphabet::semicircular(2);
        let mut t = TensorPoly::zero(2, ab, CoeffAlgebra::Scalar);
        t.add_term(
            vec![Word::from_x(&[1]), Word::from_x(&[2])],
            CMatrix::identity(1, 1),
        )
        .unwrap();
        let q = NcPoly::scalar_monomial(ab, C64::new(3.0, 0.0), Word::from_x(&[1])).unwrap();
        let r = t.mul_right(&q).unwrap();
        let c = r
            .coefficient(&[Word::from_x(&[1]), Word::from_x(&[2, 1])])
            .unwrap();
        assert_eq!(c[(0, 0)], C64::new(3.0, 0.0));
        let l = t.mul_left(&q).unwrap();
        assert!(l
            .coefficient(&[Word::from_x(&[1, 1]), Word::from_x(&[2])])
            .is_some());
        assert_eq!(t.merge(&t).unwrap().rank(), 3);
    }

    #[test]
    fn wrong_arity_rejected() {
        let mut t = TensorPoly::zero(2, Alphabet::semicircular(1), CoeffAlgebra::Scalar);
        assert!(t
            .add_term(vec![Word::empty()], CMatrix::identity(1, 1))
            .is_err());
    }
}
