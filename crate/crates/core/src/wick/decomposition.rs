use serde::{Deserialize, Serialize};

use super::trace::{semicircular_trace, FamilyWord};
use crate::combin::{chord_cycle, enumerate_configurations, ChordCycle, Configuration};
use crate::fock::{vacuum_expectation, BaseVector, CovarianceSpec, GramVectors, Letter};
use crate::linalg::pairwise_sum;
use crate::ncalg::{higher_derivative, Alphabet, NcPoly, Word};
use crate::{Error, Result, C64};

/// Cap on `sum_i deg A_i` for the decomposition routines.
pub const MAX_TOTAL_DEGREE: usize = 12;
const CROSS_TOL: f64 = 1e-9;

fn slots_of(words: &[Word]) -> Result<Vec<Vec<usize>>> {
    words
        .iter()
        .map(|w| {
            w.x_slots()
                .ok_or_else(|| Error::InvalidInput(format!("word {w} has deterministic letters")))
        })
        .collect()
}

fn check_instance(words: &[Word], kappa: &CovarianceSpec) -> Result<Vec<Vec<usize>>> {
    if words.len() != kappa.n() {
        return Err(Error::DimensionMismatch(format!(
            "{} words for a {}-family covariance",
            words.len(),
            kappa.n()
        )));
    }
    let total: usize = words.iter().map(Word::len).sum();
    if total > MAX_TOTAL_DEGREE {
        return Err(Error::Capacity(format!(
            "total degree {total} exceeds {MAX_TOTAL_DEGREE}"
        )));
    }
    slots_of(words)
}

fn alphabet_size(slots: &[Vec<usize>]) -> usize {
    slots.iter().flatten().copied().max().unwrap_or(1)
}

/// `tau(A_1(x^1) .. A_n(x^n))`, computed by non-crossing pairings and by the
/// Fock model of the correlated families; the two must agree.
pub fn edgtn_lhs(words: &[Word], kappa: &CovarianceSpec) -> Result<f64> {
    let slots = check_instance(words, kappa)?;
    let combinatorial = semicircular_trace(&FamilyWord::flatten(words)?, kappa);
    let gram = GramVectors::new(kappa, alphabet_size(&slots));
    let letters: Vec<Letter> = slots
        .iter()
        .enumerate()
        .flat_map(|(i, s)| s.iter().map(move |&u| (i, u)))
        .map(|(i, u)| Letter::Semicircular(gram.vector(i, u - 1).clone()))
        .collect();
    let fock = vacuum_expectation(gram.base_dim(), &letters);
    if (fock.re - combinatorial).abs() > CROSS_TOL || fock.im.abs() > CROSS_TOL {
        return Err(Error::Consistency(format!(
            "pairing sum {combinatorial} and Fock value {fock} disagree"
        )));
    }
    Ok(combinatorial)
}

fn semicircular_letters(d: usize, slots: &[usize]) -> impl Iterator<Item = Letter> + '_ {
    slots
        .iter()
        .map(move |&u| Letter::Semicircular(BaseVector::unit(d, u - 1)))
}

/// `tau(L(x) [l*_a] Delta(kappa) [r_b] R(x))` in a free semicircular system
/// on `C^d`.
pub fn chord_factor(
    d: usize,
    left: &[usize],
    l_star: Option<usize>,
    kappa: f64,
    r: Option<usize>,
    right: &[usize],
) -> f64 {
    let mut letters: Vec<Letter> = semicircular_letters(d, left).collect();
    if let Some(a) = l_star {
        letters.push(Letter::Annihilate(BaseVector::unit(d, a - 1)));
    }
    letters.push(Letter::Delta(kappa));
    if let Some(b) = r {
        letters.push(Letter::RightCreate(BaseVector::unit(d, b - 1)));
    }
    letters.extend(semicircular_letters(d, right));
    vacuum_expectation(d, &letters).re
}

fn fock_trace(d: usize, slots: &[usize]) -> f64 {
    let letters: Vec<Letter> = semicircular_letters(d, slots).collect();
    vacuum_expectation(d, &letters).re
}

/// Split points for one configuration: for each `i`, strictly increasing
/// cuts `k_{i,j}` for `j` in `C_i^{**}(K)`, all inside `(0, deg A_i)`.
///
/// Cuts follow the reversed chord-cycle order, whereas positions inside
/// `A_i` follow the circle order of the word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitAssignment {
    pub config: Configuration,
    pub cycles: Vec<ChordCycle>,
    /// `cuts[i-1][t]` is `k_{i, C_i^{**}[t]}`.
    pub cuts: Vec<Vec<usize>>,
    pub degrees: Vec<usize>,
}

impl SplitAssignment {
    fn cycle(&self, i: usize) -> &ChordCycle {
        &self.cycles[i - 1]
    }

    /// Boundaries `0 = b_0 < b_1 < .. < b_s = deg A_i` delimiting the
    /// segments assigned to the elements of `C_i^*(K)`.
    fn boundaries(&self, i: usize) -> Vec<usize> {
        let mut b = vec![0];
        b.extend_from_slice(&self.cuts[i - 1]);
        b.push(self.degrees[i - 1]);
        b
    }

    /// `(k_{i,j^-}, k_{i,j})` for `j` in `C_i^*(K)`.
    pub fn segment(&self, i: usize, j: usize) -> (usize, usize) {
        let t = self
            .cycle(i)
            .star
            .iter()
            .position(|&s| s == j)
            .expect("j in C_i^*");
        let b = self.boundaries(i);
        (b[t], b[t + 1])
    }

    /// Whether the last letter of `i`'s segment for `j` pairs into `A_j`,
    /// i.e. `j != i^-` in `C_i(K)`.
    pub fn consumes(&self, i: usize, j: usize) -> bool {
        self.cycle(i).pred_of_root() != Some(j)
    }
}

fn increasing_tuples(len: usize, lo: usize, hi: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, left: usize, hi: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for v in start..=hi {
            if hi + 1 - v < left {
                break;
            }
            cur.push(v);
            go(v + 1, left - 1, hi, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if len == 0 {
        out.push(Vec::new());
    } else if hi >= lo {
        go(lo, len, hi, &mut Vec::new(), &mut out);
    }
    out
}

/// Every admissible split assignment of `K` for words of the given degrees.
pub fn enumerate_splits(k: &Configuration, degrees: &[usize]) -> Result<Vec<SplitAssignment>> {
    let n = k.n();
    if degrees.len() != n {
        return Err(Error::DimensionMismatch(
            "one degree per circle point".into(),
        ));
    }
    let cycles: Vec<ChordCycle> = (1..=n).map(|i| chord_cycle(k, i)).collect::<Result<_>>()?;
    let per_point: Vec<Vec<Vec<usize>>> = (0..n)
        .map(|i| {
            let len = cycles[i].star2.len();
            if degrees[i] == 0 {
                return if len == 0 {
                    vec![Vec::new()]
                } else {
                    Vec::new()
                };
            }
            increasing_tuples(len, 1, degrees[i] - 1)
        })
        .collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    if per_point.iter().any(Vec::is_empty) {
        return Ok(out);
    }
    loop {
        out.push(SplitAssignment {
            config: k.clone(),
            cycles: cycles.clone(),
            cuts: (0..n).map(|i| per_point[i][idx[i]].clone()).collect(),
            degrees: degrees.to_vec(),
        });
        let mut t = 0;
        while t < n {
            idx[t] += 1;
            if idx[t] < per_point[t].len() {
                break;
            }
            idx[t] = 0;
            t += 1;
        }
        if t == n {
            return Ok(out);
        }
    }
}

/// One `(K, splits)` contribution to the decomposition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RhsTerm {
    #[serde(rename = "K")]
    pub chords: Vec<[usize; 2]>,
    pub splits: Vec<Vec<usize>>,
    pub value: f64,
}

fn configurations_for(n: usize) -> Result<Vec<Configuration>> {
    if n == 0 {
        return Err(Error::InvalidInput("at least one word is required".into()));
    }
    enumerate_configurations(n)
}

/// Nonzero contributions of the split-point decomposition, in enumeration
/// order. Every trace factor is a vacuum expectation on the Fock space of a
/// free semicircular system.
pub fn edgtn_rhs_terms(words: &[Word], kappa: &CovarianceSpec) -> Result<Vec<RhsTerm>> {
    let slots = check_instance(words, kappa)?;
    let d = alphabet_size(&slots);
    let degrees: Vec<usize> = slots.iter().map(Vec::len).collect();
    let mut terms = Vec::new();
    for k in configurations_for(words.len())? {
        for split in enumerate_splits(&k, &degrees)? {
            let mut value = 1.0;
            for i in k.khat() {
                value *= fock_trace(d, &slots[i - 1]);
                if value == 0.0 {
                    break;
                }
            }
            for c in k.chords() {
                if value == 0.0 {
                    break;
                }
                let (i, j) = (c.0, c.1);
                let (lo_i, hi_i) = split.segment(i, j);
                let (lo_j, hi_j) = split.segment(j, i);
                let a = &slots[i - 1];
                let b = &slots[j - 1];
                let (left, l_star) = if split.consumes(i, j) {
                    (&a[lo_i..hi_i - 1], Some(a[hi_i - 1]))
                } else {
                    (&a[lo_i..hi_i], None)
                };
                let (right, r) = if split.consumes(j, i) {
                    (&b[lo_j..hi_j - 1], Some(b[hi_j - 1]))
                } else {
                    (&b[lo_j..hi_j], None)
                };
                value *= chord_factor(d, left, l_star, kappa.get(i - 1, j - 1), r, right);
            }
            if value != 0.0 {
                terms.push(RhsTerm {
                    chords: k.chords().iter().map(|c| [c.0, c.1]).collect(),
                    splits: split.cuts.clone(),
                    value,
                });
            }
        }
    }
    Ok(terms)
}

/// Right side of the split-point decomposition.
pub fn edgtn_rhs(words: &[Word], kappa: &CovarianceSpec) -> Result<f64> {
    let values: Vec<f64> = edgtn_rhs_terms(words, kappa)?
        .iter()
        .map(|t| t.value)
        .collect();
    Ok(pairwise_sum(&values))
}

/// `H^K_z` on a simple tensor. `slots[i-1][t]` is the word in slot `t` of
/// `A_i`, aligned with `C_i^*(K)`; `z[i-1][t]` is `z_{i, C_i^{**}[t]}`.
pub fn hkz_eval(
    k: &Configuration,
    z: &[Vec<usize>],
    slots: &[Vec<Vec<usize>>],
    kappa: &CovarianceSpec,
    d: usize,
) -> Result<f64> {
    let n = k.n();
    let cycles: Vec<ChordCycle> = (1..=n).map(|i| chord_cycle(k, i)).collect::<Result<_>>()?;
    if slots.len() != n || z.len() != n {
        return Err(Error::DimensionMismatch(
            "one tensor and index list per point".into(),
        ));
    }
    for i in 0..n {
        if slots[i].len() != cycles[i].star.len() || z[i].len() != cycles[i].star2.len() {
            return Err(Error::DimensionMismatch(format!(
                "point {}: tensor rank {} and {} indices for C_i^* of size {}",
                i + 1,
                slots[i].len(),
                z[i].len(),
                cycles[i].star.len()
            )));
        }
    }
    let mut value = 1.0;
    for i in k.khat() {
        value *= fock_trace(d, &slots[i - 1][0]);
    }
    for c in k.chords() {
        let (i, j) = (c.0, c.1);
        let ti = cycles[i - 1]
            .star
            .iter()
            .position(|&s| s == j)
            .expect("partner in C_i^*");
        let tj = cycles[j - 1]
            .star
            .iter()
            .position(|&s| s == i)
            .expect("partner in C_j^*");
        let l_star = (cycles[i - 1].pred_of_root() != Some(j)).then(|| z[i - 1][ti]);
        let r = (cycles[j - 1].pred_of_root() != Some(i)).then(|| z[j - 1][tj]);
        value *= chord_factor(
            d,
            &slots[i - 1][ti],
            l_star,
            kappa.get(i - 1, j - 1),
            r,
            &slots[j - 1][tj],
        );
        if value == 0.0 {
            break;
        }
    }
    Ok(value)
}

/// Derivative form of the decomposition: the sum over `K` and
/// `z in [1,d]^{K~}` of `H^K_z` applied to the derivative tensors of the `A_i`.
pub fn hkz_route(words: &[Word], kappa: &CovarianceSpec) -> Result<f64> {
    let slots = check_instance(words, kappa)?;
    let d = alphabet_size(&slots);
    let n = words.len();
    let alphabet = Alphabet::semicircular(d);
    let polys: Vec<NcPoly> = words
        .iter()
        .map(|w| NcPoly::scalar_monomial(alphabet, C64::new(1.0, 0.0), w.clone()))
        .collect::<Result<_>>()?;
    let mut values = Vec::new();
    for k in configurations_for(n)? {
        let cycles: Vec<ChordCycle> = (1..=n).map(|i| chord_cycle(&k, i)).collect::<Result<_>>()?;
        let sizes: Vec<usize> = cycles.iter().map(|c| c.star2.len()).collect();
        let total: usize = sizes.iter().sum();
        let count = d.pow(total as u32);
        for code in 0..count {
            let mut digits = Vec::with_capacity(total);
            let mut c = code;
            for _ in 0..total {
                digits.push(c % d + 1);
                c /= d;
            }
            let mut z = Vec::with_capacity(n);
            let mut at = 0;
            for &s in &sizes {
                z.push(digits[at..at + s].to_vec());
                at += s;
            }
            let tensors = polys
                .iter()
                .zip(&z)
                .map(|(p, zi)| higher_derivative(p, zi))
                .collect::<Result<Vec<_>>>()?;
            if tensors.iter().any(|t| t.is_zero()) {
                continue;
            }
            let term_lists: Vec<Vec<(Vec<Vec<usize>>, f64)>> = tensors
                .iter()
                .map(|t| {
                    t.terms()
                        .map(|(ws, c)| {
                            (
                                ws.iter().map(|w| w.x_slots().expect("X-only")).collect(),
                                c[(0, 0)].re,
                            )
                        })
                        .collect()
                })
                .collect();
            let mut idx = vec![0usize; n];
            loop {
                let chosen: Vec<Vec<Vec<usize>>> =
                    (0..n).map(|i| term_lists[i][idx[i]].0.clone()).collect();
                let coeff: f64 = (0..n).map(|i| term_lists[i][idx[i]].1).product();
                let h = hkz_eval(&k, &z, &chosen, kappa, d)?;
                if h != 0.0 {
                    values.push(coeff * h);
                }
                let mut t = 0;
                while t < n {
                    idx[t] += 1;
                    if idx[t] < term_lists[t].len() {
                        break;
                    }
                    idx[t] = 0;
                    t += 1;
                }
                if t == n {
                    break;
                }
            }
        }
    }
    Ok(pairwise_sum(&values))
}

/// All X-monomials over `[1,d]` of length at most `max_len`, canonical order.
pub fn all_monomials(d: usize, max_len: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut layer = vec![Vec::<usize>::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * d);
        for w in &layer {
            for u in 1..=d {
                let mut v = w.clone();
                v.push(u);
                next.push(v);
            }
        }
        out.extend(next.iter().map(|s| Word::from_x(s)));
        layer = next;
    }
    out
}
