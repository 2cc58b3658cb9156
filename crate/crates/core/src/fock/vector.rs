use std::collections::BTreeMap;

use super::basis::FockBasis;
use crate::C64;

/// A vector of the base space `C^m`, stored by its nonzero components.
#[derive(Clone, Debug, PartialEq)]
pub struct BaseVector {
    pub dim: usize,
    pub entries: Vec<(usize, C64)>,
}

impl BaseVector {
    /// The basis vector `e_a` (0-based).
    pub fn unit(dim: usize, a: usize) -> Self {
        assert!(a < dim, "basis index {a} out of range for dimension {dim}");
        BaseVector {
            dim,
            entries: vec![(a, C64::new(1.0, 0.0))],
        }
    }

    pub fn from_dense(v: &[C64]) -> Self {
        BaseVector {
            dim: v.len(),
            entries: v
                .iter()
                .enumerate()
                .filter(|(_, z)| **z != C64::new(0.0, 0.0))
                .map(|(i, z)| (i, *z))
                .collect(),
        }
    }

    pub fn to_dense(&self) -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); self.dim];
        for &(i, z) in &self.entries {
            v[i] += z;
        }
        v
    }

    /// `<self, other>`, linear in the first argument.
    pub fn inner(&self, other: &BaseVector) -> C64 {
        let o = other.to_dense();
        self.entries.iter().map(|&(i, z)| z * o[i].conj()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).re.sqrt()
    }

    pub fn component(&self, a: usize) -> C64 {
        self.entries
            .iter()
            .filter(|(i, _)| *i == a)
            .map(|(_, z)| *z)
            .sum()
    }
}

/// Elementary operators on the full Fock space.
#[derive(Clone, Debug, PartialEq)]
pub enum Letter {
    /// `l(xi)`: prepend `xi`.
    Create(BaseVector),
    /// `l(xi)^*`.
    Annihilate(BaseVector),
    /// `r(xi)`: append `xi`.
    RightCreate(BaseVector),
    /// `r(xi)^*`.
    RightAnnihilate(BaseVector),
    /// `l(xi) + l(xi)^*`.
    Semicircular(BaseVector),
    /// Orthogonal projection onto level `l`.
    Projection(usize),
    /// `sum_{l >= 1} kappa^l P_l`.
    Delta(f64),
    Identity,
}

impl Letter {
    /// Whether the letter can lower the level.
    pub fn lowers(&self) -> bool {
        matches!(
            self,
            Letter::Annihilate(_) | Letter::RightAnnihilate(_) | Letter::Semicircular(_)
        )
    }

    pub fn adjoint(&self) -> Letter {
        match self {
            Letter::Create(x) => Letter::Annihilate(x.clone()),
            Letter::Annihilate(x) => Letter::Create(x.clone()),
            Letter::RightCreate(x) => Letter::RightAnnihilate(x.clone()),
            Letter::RightAnnihilate(x) => Letter::RightCreate(x.clone()),
            other => other.clone(),
        }
    }
}

type Key = (usize, u64);

/// Sparse exact vector of the (untruncated) full Fock space, keyed by
/// `(level, position within level)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FockVector {
    m: usize,
    map: BTreeMap<Key, C64>,
}

fn pow(m: usize, l: usize) -> u64 {
    (m as u64)
        .checked_pow(l as u32)
        .expect("Fock position overflow")
}

impl FockVector {
    pub fn zero(m: usize) -> Self {
        FockVector {
            m,
            map: BTreeMap::new(),
        }
    }

    pub fn vacuum(m: usize) -> Self {
        let mut v = Self::zero(m);
        v.map.insert((0, 0), C64::new(1.0, 0.0));
        v
    }

    /// Basis vector for a word of 0-based letters.
    pub fn basis_word(m: usize, word: &[usize]) -> Self {
        let pos = word.iter().fold(0u64, |acc, &a| acc * m as u64 + a as u64);
        let mut v = Self::zero(m);
        v.map.insert((word.len(), pos), C64::new(1.0, 0.0));
        v
    }

    pub fn base_dim(&self) -> usize {
        self.m
    }

    pub fn is_zero(&self) -> bool {
        self.map.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.map.len()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, u64, C64)> + '_ {
        self.map.iter().map(|(&(l, p), &z)| (l, p, z))
    }

    pub fn component(&self, level: usize, pos: u64) -> C64 {
        self.map.get(&(level, pos)).copied().unwrap_or_default()
    }

    pub fn vacuum_component(&self) -> C64 {
        self.component(0, 0)
    }

    pub fn max_level(&self) -> Option<usize> {
        self.map.keys().next_back().map(|k| k.0)
    }

    fn push(&mut self, k: Key, z: C64) {
        *self.map.entry(k).or_default() += z;
    }

    pub fn add_scaled(&mut self, other: &FockVector, s: C64) {
        for (&k, &z) in &other.map {
            self.push(k, z * s);
        }
    }

    pub fn scale(&mut self, s: C64) {
        for z in self.map.values_mut() {
            *z *= s;
        }
    }

    /// `<self, other>`, linear in the first argument.
    pub fn inner(&self, other: &FockVector) -> C64 {
        self.map
            .iter()
            .filter_map(|(k, z)| other.map.get(k).map(|w| z * w.conj()))
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.map.values().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Drop every component above `level`.
    pub fn truncate_above(&mut self, level: usize) {
        self.map.retain(|k, _| k.0 <= level);
    }

    /// Apply an elementary operator. With `depth = Some(D)` creation maps
    /// level `D` to zero, which is the truncated operator.
    pub fn apply(&self, letter: &Letter, depth: Option<usize>) -> FockVector {
        let m = self.m;
        let mu = m as u64;
        let mut out = FockVector::zero(m);
        let can_raise = |l: usize| depth.is_none_or(|d| l < d);
        match letter {
            Letter::Create(xi) => {
                for (&(l, p), &z) in &self.map {
                    if can_raise(l) {
                        let shift = pow(m, l);
                        for &(a, c) in &xi.entries {
                            out.push((l + 1, a as u64 * shift + p), c * z);
                        }
                    }
                }
            }
            Letter::RightCreate(xi) => {
                for (&(l, p), &z) in &self.map {
                    if can_raise(l) {
                        for &(a, c) in &xi.entries {
                            out.push((l + 1, p * mu + a as u64), c * z);
                        }
                    }
                }
            }
            Letter::Annihilate(xi) => self.annihilate_left(xi, &mut out),
            Letter::RightAnnihilate(xi) => {
                let dense = xi.to_dense();
                for (&(l, p), &z) in &self.map {
                    if l > 0 {
                        let c = dense[(p % mu) as usize];
                        if c != C64::new(0.0, 0.0) {
                            out.push((l - 1, p / mu), c.conj() * z);
                        }
                    }
                }
            }
            Letter::Semicircular(xi) => {
                out = self.apply(&Letter::Create(xi.clone()), depth);
                self.annihilate_left(xi, &mut out);
            }
            Letter::Projection(level) => {
                for (&k, &z) in &self.map {
                    if k.0 == *level {
                        out.push(k, z);
                    }
                }
            }
            Letter::Delta(kappa) => {
                for (&k, &z) in &self.map {
                    if k.0 > 0 {
                        out.push(k, z * kappa.powi(k.0 as i32));
                    }
                }
            }
            Letter::Identity => out = self.clone(),
        }
        out.map.retain(|_, z| *z != C64::new(0.0, 0.0));
        out
    }

    fn annihilate_left(&self, xi: &BaseVector, out: &mut FockVector) {
        let dense = xi.to_dense();
        for (&(l, p), &z) in &self.map {
            if l > 0 {
                let shift = pow(self.m, l - 1);
                let c = dense[(p / shift) as usize];
                if c != C64::new(0.0, 0.0) {
                    out.push((l - 1, p % shift), c.conj() * z);
                }
            }
        }
    }

    /// Apply `L_1 L_2 .. L_k` (so `L_k` acts first), untruncated.
    pub fn apply_product(&self, letters: &[Letter]) -> FockVector {
        let mut v = self.clone();
        for letter in letters.iter().rev() {
            v = v.apply(letter, None);
        }
        v
    }

    /// Dense coordinates in a truncated basis; components outside it are
    /// discarded.
    pub fn to_dense(&self, basis: &FockBasis) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); basis.dim()];
        for (&(l, p), &z) in &self.map {
            if l <= basis.depth() {
                out[basis.level_range(l).start + p as usize] += z;
            }
        }
        out
    }

    pub fn from_dense(basis: &FockBasis, v: &[C64]) -> Self {
        let mut out = FockVector::zero(basis.base_dim());
        for l in 0..=basis.depth() {
            let r = basis.level_range(l);
            for (p, z) in v[r].iter().enumerate() {
                if *z != C64::new(0.0, 0.0) {
                    out.map.insert((l, p as u64), *z);
                }
            }
        }
        out
    }
}

/// `<L_1 .. L_k Omega, Omega>`, exact. Components that can no longer return
/// to the vacuum are pruned along the way.
pub fn vacuum_expectation(m: usize, letters: &[Letter]) -> C64 {
    let mut lowering_left = letters.iter().filter(|l| l.lowers()).count();
    let mut v = FockVector::vacuum(m);
    for letter in letters.iter().rev() {
        if letter.lowers() {
            lowering_left -= 1;
        }
        v = v.apply(letter, None);
        v.truncate_above(lowering_left);
        if v.is_zero() {
            return C64::new(0.0, 0.0);
        }
    }
    v.vacuum_component()
}
