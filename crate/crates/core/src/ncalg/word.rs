use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Letter class: free semicircular variables `X_i` or deterministic
/// variables `Z_j`. Variant order is the canonical tag order (X before Z).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GenKind {
    Semicircular,
    Deterministic,
}

/// A single generator `X_i` or `Z_j`; `index` is 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Generator {
    pub kind: GenKind,
    pub index: usize,
}

impl Generator {
    pub fn x(index: usize) -> Self {
        Generator {
            kind: GenKind::Semicircular,
            index,
        }
    }

    pub fn z(index: usize) -> Self {
        Generator {
            kind: GenKind::Deterministic,
            index,
        }
    }

    pub fn is_semicircular(&self) -> bool {
        self.kind == GenKind::Semicircular
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GenKind::Semicircular => write!(f, "X{}", self.index),
            GenKind::Deterministic => write!(f, "Z{}", self.index),
        }
    }
}

impl FromStr for Generator {
    type Err = Error;

    /// Accepts `X<k>`, `Z<k>`, and `Y<k>` (an alias for `Z<k>`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Syntax {
            pos: 0,
            msg: format!("bad generator '{s}'"),
        };
        let mut chars = s.chars();
        let kind = match chars.next() {
            Some('X') => GenKind::Semicircular,
            Some('Z') | Some('Y') => GenKind::Deterministic,
            _ => return Err(bad()),
        };
        let index: usize = chars.as_str().parse().map_err(|_| bad())?;
        if index == 0 {
            return Err(bad());
        }
        Ok(Generator { kind, index })
    }
}

/// Alphabet bounds: `X_1..X_d` and `Z_1..Z_q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    pub d: usize,
    pub q: usize,
}

impl Alphabet {
    pub fn new(d: usize, q: usize) -> Self {
        Alphabet { d, q }
    }

    pub fn semicircular(d: usize) -> Self {
        Alphabet { d, q: 0 }
    }

    pub fn contains(&self, g: Generator) -> bool {
        g.index >= 1
            && match g.kind {
                GenKind::Semicircular => g.index <= self.d,
                GenKind::Deterministic => g.index <= self.q,
            }
    }

    pub fn check(&self, g: Generator) -> Result<()> {
        if self.contains(g) {
            Ok(())
        } else {
            Err(Error::AlphabetBounds {
                name: g.to_string(),
                d: self.d,
                q: self.q,
            })
        }
    }

    pub fn union(&self, other: &Alphabet) -> Alphabet {
        Alphabet {
            d: self.d.max(other.d),
            q: self.q.max(other.q),
        }
    }
}

/// A monomial: a finite sequence of generators. The empty word is the
/// identity monomial.
///
/// Words are ordered by length first, then lexicographically on generator
/// tags, which fixes the canonical order of polynomial terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Word(pub Vec<Generator>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Word in semicircular letters only, from 1-based slot indices.
    pub fn from_x(slots: &[usize]) -> Self {
        Word(slots.iter().map(|&i| Generator::x(i)).collect())
    }

    pub fn letters(&self) -> &[Generator] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of semicircular letters.
    pub fn xdegree(&self) -> usize {
        self.0.iter().filter(|g| g.is_semicircular()).count()
    }

    pub fn has_deterministic(&self) -> bool {
        self.0.iter().any(|g| !g.is_semicircular())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    /// `A_{(u,v)}`: letters `u..=v`, 1-based and inclusive; empty when `v < u`.
    pub fn subword(&self, u: usize, v: usize) -> Word {
        if v < u || u == 0 {
            return Word::empty();
        }
        let hi = v.min(self.len());
        if u > hi {
            return Word::empty();
        }
        Word(self.0[u - 1..hi].to_vec())
    }

    /// The 1-based semicircular slot indices, if the word has no `Z` letters.
    pub fn x_slots(&self) -> Option<Vec<usize>> {
        self.0
            .iter()
            .map(|g| g.is_semicircular().then_some(g.index))
            .collect()
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "1");
        }
        for (k, g) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

impl From<Vec<Generator>> for Word {
    fn from(v: Vec<Generator>) -> Self {
        Word(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order_is_length_then_lex() {
        let a = Word::from_x(&[2]);
        let b = Word::from_x(&[1, 1]);
        let c = Word(vec![Generator::z(1)]);
        assert!(a < b);
        assert!(a < c);
        assert!(Word::from_x(&[1]) < a);
        assert!(Word::empty() < Word::from_x(&[1]));
    }

    #[test]
    fn subword_is_one_based_inclusive() {
        let w = Word::from_x(&[1, 2, 3, 4]);
        assert_eq!(w.subword(2, 3), Word::from_x(&[2, 3]));
        assert_eq!(w.subword(3, 2), Word::empty());
        assert_eq!(w.subword(1, 4), w);
    }

    #[test]
    fn generator_parsing_accepts_y_alias() {
        assert_eq!("X3".parse::<Generator>().unwrap(), Generator::x(3));
        assert_eq!("Y2".parse::<Generator>().unwrap(), Generator::z(2));
        assert!("X0".parse::<Generator>().is_err());
        assert!("W1".parse::<Generator>().is_err());
    }

    #[test]
    fn degrees() {
        let w = Word(vec![Generator::x(1), Generator::z(1), Generator::x(2)]);
        assert_eq!(w.len(), 3);
        assert_eq!(w.xdegree(), 2);
        assert!(w.x_slots().is_none());
    }
}
