use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::wick::word_trace;
use crate::{Error, Result};

pub const MAX_GENUS_WORD: usize = 14;
pub const MAX_HZ_ORDER: usize = 30;
const HZ_CROSS_CHECK: usize = 7;

/// `E ts_N(word)` for independent GUE matrices as a polynomial in `1/N^2`:
/// `coeffs[g]` multiplies `N^{-2g}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactMoment {
    pub coeffs: Vec<BigInt>,
}

impl ExactMoment {
    pub fn zero() -> Self {
        ExactMoment { coeffs: Vec::new() }
    }

    pub fn coeff(&self, g: usize) -> BigInt {
        self.coeffs.get(g).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn eval(&self, n: u64) -> BigRational {
        let h = BigRational::new(BigInt::one(), BigInt::from(n) * BigInt::from(n));
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * &h + BigRational::from_integer(c.clone());
        }
        acc
    }

    pub fn eval_f64(&self, n: u64) -> f64 {
        self.eval(n).to_f64().unwrap_or(f64::NAN)
    }
}

fn cycles_of_gamma_pi(partner: &[usize]) -> usize {
    // gamma(i) = i + 1 mod k, applied after the pairing.
    let k = partner.len();
    let mut seen = vec![false; k];
    let mut cycles = 0;
    for s in 0..k {
        if seen[s] {
            continue;
        }
        cycles += 1;
        let mut i = s;
        while !seen[i] {
            seen[i] = true;
            i = (partner[i] + 1) % k;
        }
    }
    cycles
}

fn for_each_pairing(slots: &[usize], partner: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    let Some(first) = partner.iter().position(|&p| p == usize::MAX) else {
        f(partner);
        return;
    };
    for j in first + 1..slots.len() {
        if partner[j] == usize::MAX && slots[j] == slots[first] {
            partner[first] = j;
            partner[j] = first;
            for_each_pairing(slots, partner, f);
            partner[first] = usize::MAX;
            partner[j] = usize::MAX;
        }
    }
}

/// Wick sum over all slot-respecting pairings of `N^{#cycles(gamma pi) - 1 - k/2}`.
pub fn gue_exact_mixed_moment(slots: &[usize]) -> Result<ExactMoment> {
    let k = slots.len();
    if k > MAX_GENUS_WORD {
        return Err(Error::Capacity(format!(
            "genus oracle handles words up to length {MAX_GENUS_WORD}, got {k}"
        )));
    }
    if k % 2 == 1 {
        return Ok(ExactMoment::zero());
    }
    let mut counts = vec![0u64; k / 2 + 1];
    let mut partner = vec![usize::MAX; k];
    for_each_pairing(slots, &mut partner, &mut |p| {
        let c = cycles_of_gamma_pi(p);
        // Euler: c = k/2 + 1 - 2g.
        counts[(k / 2 + 1 - c) / 2] += 1;
    });
    let mut coeffs: Vec<BigInt> = counts.into_iter().map(BigInt::from).collect();
    while coeffs.last().is_some_and(|c| c.is_zero()) {
        coeffs.pop();
    }
    Ok(ExactMoment { coeffs })
}

/// `E ts_N(X^{2k})`, `k = 0..=k_max`, as polynomials in `h = 1/N^2` from
/// `(k + 2) m_{k+1} = (4k + 2) m_k + k (4k^2 - 1) h m_{k-1}`. Orders up to
/// 7 are checked against the pairing oracle.
pub fn harer_zagier_polynomials(k_max: usize) -> Result<Vec<ExactMoment>> {
    if k_max > MAX_HZ_ORDER {
        return Err(Error::Capacity(format!(
            "Harer-Zagier table limited to k <= {MAX_HZ_ORDER}"
        )));
    }
    let mut rows: Vec<Vec<BigRational>> = vec![vec![BigRational::one()], vec![BigRational::one()]];
    for k in 1..k_max {
        let mut next = vec![BigRational::zero(); rows[k].len().max(rows[k - 1].len() + 1)];
        let a = BigRational::from_integer(BigInt::from(4 * k + 2));
        let b = BigRational::from_integer(BigInt::from(k) * BigInt::from(4 * k * k - 1));
        for (g, c) in rows[k].iter().enumerate() {
            next[g] += &a * c;
        }
        for (g, c) in rows[k - 1].iter().enumerate() {
            next[g + 1] += &b * c;
        }
        let div = BigRational::from_integer(BigInt::from(k + 2));
        rows.push(next.into_iter().map(|c| c / &div).collect());
    }
    rows.truncate(k_max + 1);
    let table = rows
        .into_iter()
        .map(|row| {
            let coeffs = row
                .into_iter()
                .map(|c| {
                    if c.is_integer() {
                        Ok(c.to_integer())
                    } else {
                        Err(Error::Consistency(format!("non-integral genus count {c}")))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(ExactMoment { coeffs })
        })
        .collect::<Result<Vec<_>>>()?;
    for (k, m) in table.iter().enumerate().take(HZ_CROSS_CHECK + 1) {
        let oracle = gue_exact_mixed_moment(&vec![1; 2 * k])?;
        if &oracle != m {
            return Err(Error::Consistency(format!(
                "recursion and pairing oracle disagree at k = {k}"
            )));
        }
    }
    Ok(table)
}

/// The table above evaluated at a given `N`.
pub fn harer_zagier_moments(n: u64, k_max: usize) -> Result<Vec<BigRational>> {
    if n == 0 {
        return Err(Error::InvalidInput("N must be positive".into()));
    }
    Ok(harer_zagier_polynomials(k_max)?
        .iter()
        .map(|m| m.eval(n))
        .collect())
}

/// Coefficients of `N^{-2p}`, `p = 0..=p_max`. The leading one must be the
/// free trace of the word.
pub fn expansion_coefficients(slots: &[usize], p_max: usize) -> Result<Vec<BigInt>> {
    let m = gue_exact_mixed_moment(slots)?;
    let lead = m.coeff(0).to_f64().unwrap_or(f64::NAN);
    if (lead - word_trace(slots)).abs() > 1e-9 * lead.abs().max(1.0) {
        return Err(Error::Consistency(format!(
            "leading coefficient {lead} is not the free trace"
        )));
    }
    Ok((0..=p_max).map(|p| m.coeff(p)).collect())
}
