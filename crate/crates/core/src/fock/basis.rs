use crate::{Error, Result};

/// Default cap on the total dimension of a truncated basis.
pub const DEFAULT_DIM_CAP: usize = 200_000;

/// Graded basis of `F_{<=D}(C^m)`: all words of length at most `D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FockBasis {
    m: usize,
    depth: usize,
    offsets: Vec<usize>,
    powers: Vec<usize>,
}

pub fn build_basis(m: usize, depth: usize) -> Result<FockBasis> {
    build_basis_capped(m, depth, DEFAULT_DIM_CAP)
}

pub fn build_basis_capped(m: usize, depth: usize, cap: usize) -> Result<FockBasis> {
    if m == 0 {
        return Err(Error::InvalidInput(
            "base dimension must be positive".into(),
        ));
    }
    let mut offsets = Vec::with_capacity(depth + 2);
    let mut powers = Vec::with_capacity(depth + 1);
    let mut total = 0usize;
    let mut p = 1usize;
    for _ in 0..=depth {
        offsets.push(total);
        powers.push(p);
        total = total.checked_add(p).filter(|&t| t <= cap).ok_or_else(|| {
            Error::Capacity(format!("Fock dimension over cap {cap} (m={m}, D={depth})"))
        })?;
        p = p.saturating_mul(m);
    }
    offsets.push(total);
    Ok(FockBasis {
        m,
        depth,
        offsets,
        powers,
    })
}

impl FockBasis {
    pub fn base_dim(&self) -> usize {
        self.m
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn dim(&self) -> usize {
        self.offsets[self.depth + 1]
    }

    /// Index range of level `l`.
    pub fn level_range(&self, l: usize) -> std::ops::Range<usize> {
        self.offsets[l]..self.offsets[l + 1]
    }

    /// Number of basis words of length `l`, i.e. `m^l`.
    pub fn level_size(&self, l: usize) -> usize {
        self.powers[l]
    }

    pub fn index(&self, word: &[usize]) -> Option<usize> {
        if word.len() > self.depth || word.iter().any(|&a| a >= self.m) {
            return None;
        }
        let pos = word.iter().fold(0usize, |acc, &a| acc * self.m + a);
        Some(self.offsets[word.len()] + pos)
    }

    pub fn level_of(&self, index: usize) -> usize {
        self.offsets.partition_point(|&o| o <= index) - 1
    }

    /// Inverse of [`index`](Self::index); letters are 0-based.
    pub fn word(&self, index: usize) -> Vec<usize> {
        let l = self.level_of(index);
        let mut pos = index - self.offsets[l];
        let mut w = vec![0; l];
        for k in (0..l).rev() {
            w[k] = pos % self.m;
            pos /= self.m;
        }
        w
    }
}
