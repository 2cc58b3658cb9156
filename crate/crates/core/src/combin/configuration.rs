use serde::{Deserialize, Serialize};

use super::circle::{circle_interval, CircleSet};
use crate::{Error, Result};

/// Largest circle size accepted by the exhaustive enumeration.
pub const MAX_CONFIG_N: usize = 7;

/// An unordered pair `{i, j}`, stored with `i < j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Chord(pub usize, pub usize);

impl Chord {
    pub fn new(i: usize, j: usize) -> Result<Self> {
        if i == j {
            return Err(Error::InvalidInput(format!(
                "chord endpoints must differ ({i})"
            )));
        }
        Ok(Chord(i.min(j), i.max(j)))
    }

    pub fn has(&self, i: usize) -> bool {
        self.0 == i || self.1 == i
    }

    pub fn other(&self, i: usize) -> Option<usize> {
        if self.0 == i {
            Some(self.1)
        } else if self.1 == i {
            Some(self.0)
        } else {
            None
        }
    }
}

/// Chords `{i,j}` and `{k,l}` are compatible when `i, j` both lie in `[k,l]`
/// or both in `[l,k]`.
pub fn compatible(e: &CircleSet, a: Chord, b: Chord) -> bool {
    if a == b {
        return true;
    }
    let first = circle_interval(e, b.0, b.1, true).expect("chord endpoints differ");
    let second = circle_interval(e, b.1, b.0, true).expect("chord endpoints differ");
    let inside = |s: &[usize]| s.contains(&a.0) && s.contains(&a.1);
    inside(&first) || inside(&second)
}

/// `C_i(K)` together with its trimmed forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChordCycle {
    /// `C_i(K) = [k_m, .., k_2, k_1 = i]`.
    pub full: Vec<usize>,
    /// `C_i^*(K)`: `full` without `i`, or `[i]` when `i` is isolated.
    pub star: Vec<usize>,
    /// `C_i^{**}(K) = [k_m, .., k_3]`.
    pub star2: Vec<usize>,
}

impl ChordCycle {
    /// `i^-` in the reversed order, i.e. `k_2`; `None` when isolated.
    pub fn pred_of_root(&self) -> Option<usize> {
        (self.full.len() >= 2).then(|| self.full[self.full.len() - 2])
    }

    /// `i^+` in the reversed order, i.e. `k_m`; `None` when isolated.
    pub fn succ_of_root(&self) -> Option<usize> {
        (self.full.len() >= 2).then(|| self.full[0])
    }
}

/// A set of pairwise compatible chords on `((1,n))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    n: usize,
    chords: Vec<Chord>,
}

impl Configuration {
    pub fn new(n: usize, mut chords: Vec<Chord>) -> Result<Self> {
        chords.sort_unstable();
        chords.dedup();
        if chords.iter().any(|c| c.1 > n || c.0 == 0) {
            return Err(Error::IndexOutOfRange(format!("chord outside ((1,{n}))")));
        }
        let e = CircleSet::canonical(n);
        for (t, &a) in chords.iter().enumerate() {
            for &b in &chords[t + 1..] {
                if !compatible(&e, a, b) {
                    return Err(Error::InvalidInput(format!(
                        "chords {{{},{}}} and {{{},{}}} cross",
                        a.0, a.1, b.0, b.1
                    )));
                }
            }
        }
        Ok(Configuration { n, chords })
    }

    pub fn empty(n: usize) -> Self {
        Configuration {
            n,
            chords: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn chords(&self) -> &[Chord] {
        &self.chords
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        Chord::new(i, j).is_ok_and(|c| self.chords.binary_search(&c).is_ok())
    }

    /// `c_K = sum_i #{j : {i,j} in K}`.
    pub fn c_k(&self) -> usize {
        2 * self.chords.len()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.chords.iter().filter(|c| c.has(i)).count()
    }

    /// `K^`: points on no chord.
    pub fn khat(&self) -> Vec<usize> {
        (1..=self.n).filter(|&i| self.degree(i) == 0).collect()
    }

    pub fn partners(&self, i: usize) -> Vec<usize> {
        self.chords.iter().filter_map(|c| c.other(i)).collect()
    }

    pub fn to_json(&self) -> ConfigJson {
        ConfigJson {
            n: self.n,
            chords: self.chords.iter().map(|c| [c.0, c.1]).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigJson {
    pub n: usize,
    pub chords: Vec<[usize; 2]>,
}

/// `C_i(K)`, `C_i^*(K)`, `C_i^{**}(K)`.
pub fn chord_cycle(k: &Configuration, i: usize) -> Result<ChordCycle> {
    if i == 0 || i > k.n {
        return Err(Error::IndexOutOfRange(format!("{i} not in ((1,{}))", k.n)));
    }
    let n = k.n;
    let mut ordered = k.partners(i);
    ordered.sort_by_key(|&j| (j + n - i) % n);
    let mut full: Vec<usize> = ordered.into_iter().rev().collect();
    full.push(i);
    let star = if full.len() == 1 {
        vec![i]
    } else {
        full[..full.len() - 1].to_vec()
    };
    let star2 = if full.len() >= 3 {
        full[..full.len() - 2].to_vec()
    } else {
        Vec::new()
    };
    Ok(ChordCycle { full, star, star2 })
}

fn all_chords(n: usize) -> Vec<Chord> {
    (1..=n)
        .flat_map(|i| (i + 1..=n).map(move |j| Chord(i, j)))
        .collect()
}

/// Visit every configuration of `((1,n))` by depth-first search over chord
/// subsets, extending only with chords compatible with everything chosen.
pub fn for_each_configuration<F: FnMut(&Configuration)>(n: usize, mut visit: F) -> Result<()> {
    if n > MAX_CONFIG_N {
        return Err(Error::Capacity(format!(
            "configuration enumeration capped at n = {MAX_CONFIG_N}"
        )));
    }
    let e = CircleSet::canonical(n.max(1));
    let chords = if n >= 2 { all_chords(n) } else { Vec::new() };
    let c = chords.len();
    let compat: Vec<Vec<bool>> = (0..c)
        .map(|a| {
            (0..c)
                .map(|b| compatible(&e, chords[a], chords[b]))
                .collect()
        })
        .collect();
    fn go<F: FnMut(&Configuration)>(
        start: usize,
        chosen: &mut Vec<usize>,
        chords: &[Chord],
        compat: &[Vec<bool>],
        n: usize,
        visit: &mut F,
    ) {
        let k = Configuration {
            n,
            chords: chosen.iter().map(|&t| chords[t]).collect(),
        };
        visit(&k);
        for t in start..chords.len() {
            if chosen.iter().all(|&s| compat[s][t]) {
                chosen.push(t);
                go(t + 1, chosen, chords, compat, n, visit);
                chosen.pop();
            }
        }
    }
    go(0, &mut Vec::new(), &chords, &compat, n, &mut visit);
    Ok(())
}

/// `K_n` in depth-first order; the empty configuration comes first.
pub fn enumerate_configurations(n: usize) -> Result<Vec<Configuration>> {
    let mut out = Vec::new();
    for_each_configuration(n, |k| out.push(k.clone()))?;
    Ok(out)
}

/// The fan `{1,j}` together with all boundary chords `{j,j+1}`.
pub fn remark_configuration(n: usize) -> Result<Configuration> {
    if n < 2 {
        return Err(Error::InvalidInput("needs at least two points".into()));
    }
    let mut chords: Vec<Chord> = (2..=n).map(|j| Chord(1, j)).collect();
    for j in 1..=n {
        let next = if j == n { 1 } else { j + 1 };
        chords.push(Chord::new(j, next)?);
    }
    Configuration::new(n, chords)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub n: usize,
    pub count: u64,
    #[serde(rename = "max_cK")]
    pub max_ck: usize,
    pub bound_4n6: usize,
    pub bound_80e: f64,
    /// `c_K` of the fan-plus-boundary configuration.
    #[serde(rename = "remark_cK")]
    pub remark_ck: usize,
}

/// Exhaustively check `c_K <= 4n - 6`, `#K_n <= (80e)^n`, and that the
/// fan-plus-boundary configuration attains `4n - 6`.
pub fn verify_bounds(n: usize) -> Result<BoundsReport> {
    if !(2..=MAX_CONFIG_N).contains(&n) {
        return Err(Error::Capacity(format!(
            "n must lie in [2, {MAX_CONFIG_N}]"
        )));
    }
    let bound = 4 * n - 6;
    let mut count = 0u64;
    let mut max_ck = 0usize;
    let mut witness: Option<Configuration> = None;
    let e = CircleSet::canonical(n);
    for_each_configuration(n, |k| {
        count += 1;
        max_ck = max_ck.max(k.c_k());
        let valid = k
            .chords
            .iter()
            .all(|&a| k.chords.iter().all(|&b| compatible(&e, a, b)));
        if witness.is_none() && (k.c_k() > bound || !valid) {
            witness = Some(k.clone());
        }
    })?;
    if let Some(k) = witness {
        return Err(Error::BoundViolation(format!(
            "configuration {:?} violates c_K <= {bound} or compatibility",
            k.to_json().chords
        )));
    }
    let bound_80e = (80.0 * std::f64::consts::E).powi(n as i32);
    if count as f64 > bound_80e {
        return Err(Error::BoundViolation(format!(
            "#K_{n} = {count} exceeds (80e)^{n}"
        )));
    }
    let remark = remark_configuration(n)?;
    if remark.c_k() != bound {
        return Err(Error::BoundViolation(format!(
            "fan-plus-boundary configuration has c_K = {} instead of {bound}",
            remark.c_k()
        )));
    }
    Ok(BoundsReport {
        n,
        count,
        max_ck,
        bound_4n6: bound,
        bound_80e,
        remark_ck: remark.c_k(),
    })
}
