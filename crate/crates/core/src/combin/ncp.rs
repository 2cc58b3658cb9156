use num_bigint::BigUint;

use crate::{Error, Result};

/// Largest number of points accepted by [`enumerate_ncp`].
pub const MAX_NCP_POINTS: usize = 24;

/// A perfect matching of `[1, k]`; pairs are stored as `(a, b)` with `a < b`,
/// sorted by `a`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairPartition {
    pub pairs: Vec<(usize, usize)>,
}

impl PairPartition {
    pub fn new(mut pairs: Vec<(usize, usize)>) -> Result<Self> {
        for p in &mut pairs {
            if p.0 > p.1 {
                *p = (p.1, p.0);
            }
        }
        pairs.sort_unstable();
        let k = 2 * pairs.len();
        let mut seen = vec![false; k + 1];
        for &(a, b) in &pairs {
            for x in [a, b] {
                if x == 0 || x > k || std::mem::replace(&mut seen[x], true) {
                    return Err(Error::InvalidInput(format!(
                        "not a perfect matching of [1,{k}]"
                    )));
                }
            }
        }
        Ok(PairPartition { pairs })
    }

    pub fn points(&self) -> usize {
        2 * self.pairs.len()
    }

    /// Partner of each point, `partner[p]` for `p` in `1..=k` (index 0 unused).
    pub fn partners(&self) -> Vec<usize> {
        let mut v = vec![0; self.points() + 1];
        for &(a, b) in &self.pairs {
            v[a] = b;
            v[b] = a;
        }
        v
    }
}

/// True iff no two pairs interleave as `a < c < b < d`.
pub fn is_noncrossing(pp: &PairPartition) -> bool {
    pp.pairs
        .iter()
        .all(|&(a, b)| pp.pairs.iter().all(|&(c, d)| !(a < c && c < b && b < d)))
}

/// All non-crossing pair partitions of `[1, k]`, in lexicographic order.
pub fn enumerate_ncp(k: usize) -> Result<Vec<PairPartition>> {
    if k > MAX_NCP_POINTS {
        return Err(Error::Capacity(format!(
            "{k} points exceed the cap {MAX_NCP_POINTS}"
        )));
    }
    if k % 2 == 1 {
        return Ok(Vec::new());
    }
    fn go(lo: usize, hi: usize) -> Vec<Vec<(usize, usize)>> {
        if lo > hi {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        // `lo` pairs with `j`; both sides of the chord must be even.
        for j in (lo + 1..=hi).step_by(2) {
            let inner = go(lo + 1, j - 1);
            let outer = go(j + 1, hi);
            for a in &inner {
                for b in &outer {
                    let mut v = Vec::with_capacity(1 + a.len() + b.len());
                    v.push((lo, j));
                    v.extend_from_slice(a);
                    v.extend_from_slice(b);
                    v.sort_unstable();
                    out.push(v);
                }
            }
        }
        out
    }
    let mut all: Vec<PairPartition> = go(1, k)
        .into_iter()
        .map(|pairs| PairPartition { pairs })
        .collect();
    all.sort();
    Ok(all)
}

/// `C_m = binom(2m, m) / (m + 1)`.
pub fn catalan(m: usize) -> BigUint {
    let mut c = BigUint::from(1u32);
    for i in 0..m {
        c = c * BigUint::from(2 * (2 * i + 1)) / BigUint::from(i + 2);
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Every perfect matching of `[1, k]`.
    fn all_matchings(k: usize) -> Vec<PairPartition> {
        fn go(free: Vec<usize>) -> Vec<Vec<(usize, usize)>> {
            if free.is_empty() {
                return vec![vec![]];
            }
            let a = free[0];
            let mut out = Vec::new();
            for t in 1..free.len() {
                let rest: Vec<usize> = free
                    .iter()
                    .enumerate()
                    .filter(|&(s, _)| s != 0 && s != t)
                    .map(|(_, &x)| x)
                    .collect();
                for mut m in go(rest) {
                    m.push((a, free[t]));
                    out.push(m);
                }
            }
            out
        }
        go((1..=k).collect())
            .into_iter()
            .map(|p| PairPartition::new(p).unwrap())
            .collect()
    }

    #[test]
    fn small_cases_by_brute_force() {
        assert_eq!(
            enumerate_ncp(2).unwrap(),
            vec![PairPartition::new(vec![(1, 2)]).unwrap()]
        );
        let four = enumerate_ncp(4).unwrap();
        assert_eq!(
            four,
            vec![
                PairPartition::new(vec![(1, 2), (3, 4)]).unwrap(),
                PairPartition::new(vec![(1, 4), (2, 3)]).unwrap()
            ]
        );
        for k in [4usize, 6, 8] {
            let mut brute: Vec<_> = all_matchings(k)
                .into_iter()
                .filter(is_noncrossing)
                .collect();
            brute.sort();
            assert_eq!(brute, enumerate_ncp(k).unwrap());
        }
        assert_eq!(enumerate_ncp(8).unwrap().len(), 14);
        assert!(enumerate_ncp(5).unwrap().is_empty());
        assert!(enumerate_ncp(26).is_err());
    }

    #[test]
    fn crossing_predicate() {
        let p = |v: Vec<(usize, usize)>| PairPartition::new(v).unwrap();
        assert!(is_noncrossing(&p(vec![(1, 2), (3, 4)])));
        assert!(!is_noncrossing(&p(vec![(1, 3), (2, 4)])));
        assert!(is_noncrossing(&p(vec![(1, 6), (2, 5), (3, 4)])));
    }

    #[test]
    fn catalan_numbers() {
        let first: Vec<u64> = (0..8).map(|m| catalan(m).try_into().unwrap()).collect();
        assert_eq!(first, vec![1, 1, 2, 5, 14, 42, 132, 429]);
        for m in 0..=10 {
            assert_eq!(
                BigUint::from(enumerate_ncp(2 * m).unwrap().len()),
                catalan(m)
            );
        }
    }
}
