use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::word::{Alphabet, Generator, Word};
use crate::{CMatrix, Error, Result, C64};

/// Entries at or below this magnitude are treated as zero when deciding
/// whether a term survives.
pub const ZERO_TOL: f64 = 1e-12;

/// Coefficient algebra: complex scalars, or complex `m x m` matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CoeffAlgebra {
    Scalar,
    Matrix(usize),
}

impl CoeffAlgebra {
    pub fn dim(&self) -> usize {
        match *self {
            CoeffAlgebra::Scalar => 1,
            CoeffAlgebra::Matrix(m) => m,
        }
    }

    pub fn identity(&self) -> CMatrix {
        CMatrix::identity(self.dim(), self.dim())
    }

    pub fn scalar(&self, c: C64) -> CMatrix {
        self.identity() * c
    }

    fn of_dim(m: usize) -> Self {
        if m == 1 {
            CoeffAlgebra::Scalar
        } else {
            CoeffAlgebra::Matrix(m)
        }
    }

    pub(crate) fn check_same(&self, other: &CoeffAlgebra) -> Result<()> {
        if self.dim() == other.dim() {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch(format!(
                "coefficient dimensions {} and {}",
                self.dim(),
                other.dim()
            )))
        }
    }
}

pub(crate) fn is_negligible(a: &CMatrix) -> bool {
    a.iter().all(|z| z.norm() <= ZERO_TOL)
}

/// A noncommutative polynomial `sum_M a_M (x) M` with coefficients in a
/// scalar or matrix algebra. Terms are kept in canonical word order and no
/// stored coefficient is (numerically) zero.
#[derive(Clone, Debug, PartialEq)]
pub struct NcPoly {
    alphabet: Alphabet,
    algebra: CoeffAlgebra,
    terms: BTreeMap<Word, CMatrix>,
}

impl NcPoly {
    pub fn zero(alphabet: Alphabet, algebra: CoeffAlgebra) -> Self {
        NcPoly {
            alphabet,
            algebra,
            terms: BTreeMap::new(),
        }
    }

    /// `1 (x) 1`.
    pub fn one(alphabet: Alphabet, algebra: CoeffAlgebra) -> Self {
        Self::monomial(alphabet, algebra.identity(), Word::empty()).expect("identity shape")
    }

    pub fn monomial(alphabet: Alphabet, coeff: CMatrix, word: Word) -> Result<Self> {
        let mut p = NcPoly::zero(alphabet, CoeffAlgebra::of_dim(coeff.nrows()));
        p.add_term(word, coeff)?;
        Ok(p)
    }

    pub fn scalar_monomial(alphabet: Alphabet, c: C64, word: Word) -> Result<Self> {
        Self::monomial(alphabet, CMatrix::from_element(1, 1, c), word)
    }

    /// Build from `(coefficient, word)` pairs, accumulating repeated words.
    pub fn from_terms<I>(alphabet: Alphabet, algebra: CoeffAlgebra, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (CMatrix, Word)>,
    {
        let mut p = NcPoly::zero(alphabet, algebra);
        for (c, w) in terms {
            p.add_term(w, c)?;
        }
        Ok(p)
    }

    pub fn from_scalar_terms<I>(alphabet: Alphabet, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (C64, Word)>,
    {
        Self::from_terms(
            alphabet,
            CoeffAlgebra::Scalar,
            terms
                .into_iter()
                .map(|(c, w)| (CMatrix::from_element(1, 1, c), w)),
        )
    }

    /// Accumulate `coeff (x) word` into the polynomial.
    pub fn add_term(&mut self, word: Word, coeff: CMatrix) -> Result<()> {
        let m = self.algebra.dim();
        if coeff.nrows() != m || coeff.ncols() != m {
            return Err(Error::AlgebraMismatch(format!(
                "coefficient of shape {}x{} in a {m}-dimensional algebra",
                coeff.nrows(),
                coeff.ncols()
            )));
        }
        for g in word.letters() {
            self.alphabet.check(*g)?;
        }
        match self.terms.get_mut(&word) {
            Some(c) => {
                *c += coeff;
                if is_negligible(c) {
                    self.terms.remove(&word);
                }
            }
            None => {
                if !is_negligible(&coeff) {
                    self.terms.insert(word, coeff);
                }
            }
        }
        Ok(())
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn algebra(&self) -> CoeffAlgebra {
        self.algebra
    }

    /// Same polynomial over a larger alphabet.
    pub fn with_alphabet(mut self, alphabet: Alphabet) -> Result<Self> {
        for w in self.terms.keys() {
            for g in w.letters() {
                alphabet.check(*g)?;
            }
        }
        self.alphabet = alphabet;
        Ok(self)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &CMatrix)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, w: &Word) -> Option<&CMatrix> {
        self.terms.get(w)
    }

    /// Number of nonzero terms; see `is_zero`.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` stands for the zero polynomial's `-inf`.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(Word::len).max()
    }

    pub fn xdegree(&self) -> Option<usize> {
        self.terms.keys().map(Word::xdegree).max()
    }

    pub fn has_deterministic(&self) -> bool {
        self.terms.keys().any(Word::has_deterministic)
    }

    /// The scalar coefficient of `w` when the algebra is `C`.
    pub fn scalar_coefficient(&self, w: &Word) -> C64 {
        self.terms.get(w).map(|c| c[(0, 0)]).unwrap_or_default()
    }

    pub fn add(&self, other: &NcPoly) -> Result<NcPoly> {
        self.algebra.check_same(&other.algebra)?;
        let mut out = self.clone();
        out.alphabet = self.alphabet.union(&other.alphabet);
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &NcPoly) -> Result<NcPoly> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> NcPoly {
        self.scale(C64::new(-1.0, 0.0))
    }

    pub fn scale(&self, s: C64) -> NcPoly {
        let mut out = NcPoly::zero(self.alphabet, self.algebra);
        for (w, c) in &self.terms {
            out.add_term(w.clone(), c * s).expect("same shape");
        }
        out
    }

    /// `a (x) 1` times `self`, i.e. multiply every coefficient on the left.
    pub fn left_coeff_mul(&self, a: &CMatrix) -> Result<NcPoly> {
        let mut out = NcPoly::zero(self.alphabet, self.algebra);
        for (w, c) in &self.terms {
            out.add_term(w.clone(), a * c)?;
        }
        Ok(out)
    }

    pub fn mul(&self, other: &NcPoly) -> Result<NcPoly> {
        self.algebra.check_same(&other.algebra)?;
        let mut out = NcPoly::zero(self.alphabet.union(&other.alphabet), self.algebra);
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                out.add_term(w1.concat(w2), c1 * c2)?;
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: usize) -> NcPoly {
        let mut out = NcPoly::one(self.alphabet, self.algebra);
        for _ in 0..k {
            out = out.mul(self).expect("same algebra");
        }
        out
    }

    /// `a (x) M  ->  a^* (x) reverse(M)`; generators are self-adjoint.
    pub fn adjoint(&self) -> NcPoly {
        let mut out = NcPoly::zero(self.alphabet, self.algebra);
        for (w, c) in &self.terms {
            out.add_term(w.reversed(), c.adjoint()).expect("same shape");
        }
        out
    }

    /// Max entrywise difference against `other`, over the union of supports.
    pub fn max_abs_diff(&self, other: &NcPoly) -> f64 {
        let m = self.algebra.dim();
        let zero = CMatrix::zeros(m, m);
        let mut worst = 0.0f64;
        for w in self.terms.keys().chain(other.terms.keys()) {
            let a = self.terms.get(w).unwrap_or(&zero);
            let b = other.terms.get(w).unwrap_or(&zero);
            if a.shape() != b.shape() {
                return f64::INFINITY;
            }
            for (x, y) in a.iter().zip(b.iter()) {
                worst = worst.max((x - y).norm());
            }
        }
        worst
    }

    pub fn approx_eq(&self, other: &NcPoly, tol: f64) -> bool {
        self.algebra.dim() == other.algebra.dim() && self.max_abs_diff(other) <= tol
    }

    /// Distinct generators occurring in the polynomial, in tag order.
    pub fn generators(&self) -> Vec<Generator> {
        let mut v: Vec<Generator> = self
            .terms
            .keys()
            .flat_map(|w| w.letters().iter().copied())
            .collect();
        v.sort();
        v.dedup();
        v
    }
}

fn fmt_real(x: f64) -> String {
    format!("{x}")
}

fn fmt_coeff(c: C64) -> String {
    if c.im == 0.0 {
        fmt_real(c.re)
    } else if c.re == 0.0 {
        format!("{}i", fmt_real(c.im))
    } else if c.im < 0.0 {
        format!("({}-{}i)", fmt_real(c.re), fmt_real(-c.im))
    } else {
        format!("({}+{}i)", fmt_real(c.re), fmt_real(c.im))
    }
}

/// DSL printer. Scalar polynomials print so that `parse_poly` reads them
/// back; matrix coefficients print with a placeholder and need the JSON form.
impl fmt::Display for NcPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (w, c)) in self.terms.iter().enumerate() {
            let body = if self.algebra.dim() == 1 {
                let mut z = c[(0, 0)];
                let negative = z.im == 0.0 && z.re < 0.0;
                if negative {
                    z = -z;
                }
                match (k, negative) {
                    (0, true) => write!(f, "-")?,
                    (0, false) => {}
                    (_, true) => write!(f, " - ")?,
                    (_, false) => write!(f, " + ")?,
                }
                if z == C64::new(1.0, 0.0) && !w.is_empty() {
                    w.to_string()
                } else if w.is_empty() {
                    fmt_coeff(z)
                } else {
                    format!("{}*{w}", fmt_coeff(z))
                }
            } else {
                if k > 0 {
                    write!(f, " + ")?;
                }
                format!("[{}x{}]*{w}", c.nrows(), c.ncols())
            };
            write!(f, "{body}")?;
        }
        Ok(())
    }
}
