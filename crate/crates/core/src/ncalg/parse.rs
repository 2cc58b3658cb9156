//! Polynomial DSL and the JSON interchange form.
//!
//! Grammar (whitespace insignificant):
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor (['*'] factor)*
//! factor := atom ['^' digits]
//! atom   := number ['i'] | 'i' | ('X'|'Z'|'Y') digits | '(' expr ')'
//! ```
//!
//! `Y<k>` is accepted as a synonym for `Z<k>`.

use serde::{Deserialize, Serialize};

use super::poly::{CoeffAlgebra, NcPoly};
use super::word::{Alphabet, GenKind, Generator, Word};
use crate::{CMatrix, Error, Result, C64};

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    alphabet: Alphabet,
    algebra: CoeffAlgebra,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn digits(&mut self) -> &'a str {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).expect("ascii")
    }

    fn constant(&self, c: C64) -> NcPoly {
        NcPoly::one(self.alphabet, self.algebra).scale(c)
    }

    fn expr(&mut self) -> Result<NcPoly> {
        let mut acc = NcPoly::zero(self.alphabet, self.algebra);
        let mut sign = 1.0;
        match self.peek() {
            Some(b'+') => self.pos += 1,
            Some(b'-') => {
                self.pos += 1;
                sign = -1.0;
            }
            _ => {}
        }
        loop {
            let t = self.term()?;
            acc = acc.add(&t.scale(C64::new(sign, 0.0)))?;
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    sign = 1.0;
                }
                Some(b'-') => {
                    self.pos += 1;
                    sign = -1.0;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn starts_factor(c: u8) -> bool {
        c.is_ascii_digit() || matches!(c, b'.' | b'(' | b'i' | b'X' | b'Z' | b'Y')
    }

    fn term(&mut self) -> Result<NcPoly> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let f = self.factor()?;
                    acc = acc.mul(&f)?;
                }
                Some(c) if Self::starts_factor(c) => {
                    let f = self.factor()?;
                    acc = acc.mul(&f)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<NcPoly> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let d = self.digits();
            if d.is_empty() {
                return self.err("expected exponent");
            }
            let k: usize = d.parse().map_err(|_| Error::Syntax {
                pos: self.pos,
                msg: "exponent too large".into(),
            })?;
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn number(&mut self) -> Result<f64> {
        let start = self.pos;
        self.digits();
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            self.digits();
        }
        if matches!(self.src.get(self.pos), Some(b'e') | Some(b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+') | Some(b'-')) {
                self.pos += 1;
            }
            if self.digits().is_empty() {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse().map_err(|_| Error::Syntax {
            pos: start,
            msg: format!("bad number '{text}'"),
        })
    }

    fn atom(&mut self) -> Result<NcPoly> {
        match self.peek() {
            None => self.err("unexpected end of input"),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(e)
            }
            Some(b'i') => {
                self.pos += 1;
                Ok(self.constant(C64::new(0.0, 1.0)))
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let v = self.number()?;
                if self.src.get(self.pos) == Some(&b'i') {
                    self.pos += 1;
                    Ok(self.constant(C64::new(0.0, v)))
                } else {
                    Ok(self.constant(C64::new(v, 0.0)))
                }
            }
            Some(c @ (b'X' | b'Z' | b'Y')) => {
                let start = self.pos;
                self.pos += 1;
                let d = self.digits();
                let index: usize = match d.parse() {
                    Ok(v) if v > 0 => v,
                    _ => {
                        self.pos = start;
                        return self.err("generator needs a positive index");
                    }
                };
                let kind = if c == b'X' {
                    GenKind::Semicircular
                } else {
                    GenKind::Deterministic
                };
                let g = Generator { kind, index };
                self.alphabet.check(g)?;
                NcPoly::monomial(self.alphabet, self.algebra.identity(), Word(vec![g]))
            }
            Some(c) => self.err(format!("unexpected character '{}'", c as char)),
        }
    }
}

/// Parse the polynomial DSL over `alphabet`; scalars embed as multiples of
/// the algebra's identity.
pub fn parse_poly(text: &str, alphabet: Alphabet, algebra: CoeffAlgebra) -> Result<NcPoly> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        alphabet,
        algebra,
    };
    let out = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(out)
}

/// Parse a bare complex scalar in DSL syntax, e.g. `2`, `-1.5i`, `(1+2i)`.
pub fn parse_complex(text: &str) -> Result<C64> {
    let p = parse_poly(text, Alphabet::new(0, 0), CoeffAlgebra::Scalar)?;
    Ok(p.scalar_coefficient(&Word::empty()))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermJson {
    /// Row-major rows of `[re, im]` pairs.
    pub coeff: Vec<Vec<[f64; 2]>>,
    pub word: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolyJson {
    pub terms: Vec<TermJson>,
}

/// Read the JSON form. The algebra is inferred from the coefficient shape
/// (`1x1` is scalar); every term must agree.
pub fn poly_from_json(text: &str, alphabet: Alphabet) -> Result<NcPoly> {
    let parsed: PolyJson = serde_json::from_str(text).map_err(|e| Error::Syntax {
        pos: e.column(),
        msg: e.to_string(),
    })?;
    let m = parsed.terms.first().map(|t| t.coeff.len()).unwrap_or(1);
    let algebra = if m == 1 {
        CoeffAlgebra::Scalar
    } else {
        CoeffAlgebra::Matrix(m)
    };
    let mut p = NcPoly::zero(alphabet, algebra);
    for t in &parsed.terms {
        if t.coeff.len() != m || t.coeff.iter().any(|row| row.len() != m) {
            return Err(Error::AlgebraMismatch(format!(
                "expected {m}x{m} coefficients"
            )));
        }
        let c = CMatrix::from_fn(m, m, |r, s| C64::new(t.coeff[r][s][0], t.coeff[r][s][1]));
        let letters = t
            .word
            .iter()
            .map(|s| s.parse::<Generator>())
            .collect::<Result<Vec<_>>>()?;
        p.add_term(Word(letters), c)?;
    }
    Ok(p)
}

pub fn poly_to_json(p: &NcPoly) -> PolyJson {
    PolyJson {
        terms: p
            .terms()
            .map(|(w, c)| TermJson {
                coeff: (0..c.nrows())
                    .map(|r| {
                        (0..c.ncols())
                            .map(|s| [c[(r, s)].re, c[(r, s)].im])
                            .collect()
                    })
                    .collect(),
                word: w.letters().iter().map(|g| g.to_string()).collect(),
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{random_poly, rng};
    use proptest::prelude::*;

    fn ab() -> Alphabet {
        Alphabet::new(3, 2)
    }

    fn parse(s: &str) -> Result<NcPoly> {
        parse_poly(s, ab(), CoeffAlgebra::Scalar)
    }

    #[test]
    fn basic_forms() {
        let p = parse("X1*X2 + 2*X3").unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(
            p.scalar_coefficient(&Word::from_x(&[3])),
            C64::new(2.0, 0.0)
        );
        let q = parse("(1+1i)*Z1*X1").unwrap();
        let w = Word(vec![Generator::z(1), Generator::x(1)]);
        assert_eq!(q.scalar_coefficient(&w), C64::new(1.0, 1.0));
        assert_eq!(parse("X1^3").unwrap(), parse("X1*X1*X1").unwrap());
        assert_eq!(parse("X1X2").unwrap(), parse("X1*X2").unwrap());
        assert_eq!(parse("(X1+X2)^2").unwrap().len(), 4);
        assert_eq!(parse("Y2").unwrap(), parse("Z2").unwrap());
        assert_eq!(parse_complex("-2.5i").unwrap(), C64::new(0.0, -2.5));
        assert_eq!(parse_complex("1e-3").unwrap(), C64::new(1e-3, 0.0));
    }

    #[test]
    fn errors_carry_position() {
        match parse("X1 + * X2") {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("X4"), Err(Error::AlphabetBounds { .. })));
        assert!(matches!(parse("Z3"), Err(Error::AlphabetBounds { .. })));
        assert!(parse("X1 )").is_err());
        assert!(parse("").is_err());
    }

    #[test]
    fn json_round_trip_with_matrices() {
        let mut r = rng(9);
        let p = random_poly(&mut r, 3, CoeffAlgebra::Matrix(2), 3, 5);
        let text = serde_json::to_string(&poly_to_json(&p)).unwrap();
        let back = poly_from_json(&text, ab()).unwrap();
        assert_eq!(back.with_alphabet(p.alphabet()).unwrap(), p);
    }

    proptest! {
        #[test]
        fn printer_round_trips(seed in 0u64..100_000) {
            let mut r = rng(seed);
            let p = random_poly(&mut r, 3, CoeffAlgebra::Scalar, 4, 5);
            let back = parse_poly(&p.to_string(), p.alphabet(), CoeffAlgebra::Scalar).unwrap();
            prop_assert_eq!(back, p);
        }
    }
}
