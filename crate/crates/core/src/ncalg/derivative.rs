use super::poly::NcPoly;
use super::tensor::TensorPoly;
use super::word::{Alphabet, Generator, Word};
use crate::{Error, Result};

fn check_index(alphabet: Alphabet, i: usize) -> Result<()> {
    if i == 0 || i > alphabet.d {
        Err(Error::IndexOutOfRange(format!(
            "derivative index {i} outside [1,{}]",
            alphabet.d
        )))
    } else {
        Ok(())
    }
}

/// Split the last slot at every occurrence of `X_i`.
fn differentiate_last(t: &TensorPoly, i: usize) -> TensorPoly {
    let target = Generator::x(i);
    let mut out = TensorPoly::zero(t.rank() + 1, t.alphabet(), t.algebra());
    for (slots, c) in t.terms() {
        let (head, last) = slots.split_at(slots.len() - 1);
        let letters = last[0].letters();
        for (p, g) in letters.iter().enumerate() {
            if *g == target {
                let mut s = head.to_vec();
                s.push(Word(letters[..p].to_vec()));
                s.push(Word(letters[p + 1..].to_vec()));
                out.add_term(s, c.clone()).expect("rank and shape agree");
            }
        }
    }
    out
}

/// `d_i P = sum_{M = A X_i B} a_M (x) A (x) B`.
pub fn partial_derivative(p: &NcPoly, i: usize) -> Result<TensorPoly> {
    check_index(p.alphabet(), i)?;
    Ok(differentiate_last(&TensorPoly::from_poly(p), i))
}

/// `d_{i_1} (x) ... (x) d_{i_n} P`, differentiating the last slot at each step.
pub fn higher_derivative(p: &NcPoly, indices: &[usize]) -> Result<TensorPoly> {
    for &i in indices {
        check_index(p.alphabet(), i)?;
    }
    let mut t = TensorPoly::from_poly(p);
    for &i in indices {
        t = differentiate_last(&t, i);
    }
    Ok(t)
}

/// Compositions of `r` into `parts` positive summands, in lex order.
fn compositions(r: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if r == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=r.saturating_sub(parts - 1) {
        for mut rest in compositions(r - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Strictly increasing `x`-tuples in `1..=k`.
fn increasing_tuples(x: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, left: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for v in start..=k {
            if k - v + 1 < left {
                break;
            }
            cur.push(v);
            go(v + 1, left - 1, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(1, x, k, &mut Vec::new(), &mut out);
    out
}

/// Expansion of `d_{z_1} o ... o d_{z_r} (P^k)` as the sum over split counts
/// `x`, sizes `r_1 + .. + r_x = r`, and positions `k_1 < .. < k_x <= k` of
/// `P^{k_1-1} D_1 P^{k_2-k_1-1} D_2 ... D_x P^{k-k_x}` with
/// `D_t = higher_derivative(P, next r_t indices)`, adjacent slots merged.
pub fn power_derivative_expansion(p: &NcPoly, z: &[usize], k: usize) -> Result<TensorPoly> {
    if k == 0 || z.is_empty() {
        return Err(Error::InvalidInput(
            "power and derivative order must be positive".into(),
        ));
    }
    for &i in z {
        check_index(p.alphabet(), i)?;
    }
    let r = z.len();
    let powers: Vec<TensorPoly> = {
        let mut v = vec![TensorPoly::from_poly(&NcPoly::one(
            p.alphabet(),
            p.algebra(),
        ))];
        for j in 1..=k {
            let next = TensorPoly::from_poly(&p.pow(j));
            v.push(next);
        }
        v
    };
    let mut total = TensorPoly::zero(r + 1, p.alphabet(), p.algebra());
    for x in 1..=r.min(k) {
        for sizes in compositions(r, x) {
            let mut blocks = Vec::with_capacity(x);
            let mut at = 0;
            for &s in &sizes {
                blocks.push(higher_derivative(p, &z[at..at + s])?);
                at += s;
            }
            if blocks.iter().any(TensorPoly::is_zero) {
                continue;
            }
            for pos in increasing_tuples(x, k) {
                let mut acc = powers[pos[0] - 1].clone();
                for t in 0..x {
                    acc = acc.merge(&blocks[t])?;
                    let gap = if t + 1 < x {
                        pos[t + 1] - pos[t] - 1
                    } else {
                        k - pos[t]
                    };
                    acc = acc.merge(&powers[gap])?;
                }
                total = total.add(&acc)?;
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncalg::CoeffAlgebra;
    use crate::testutil::{random_poly, rng};
    use crate::{CMatrix, C64};
    use proptest::prelude::*;

    fn ab() -> Alphabet {
        Alphabet::semicircular(2)
    }

    fn mono(slots: &[usize]) -> NcPoly {
        NcPoly::scalar_monomial(ab(), C64::new(1.0, 0.0), Word::from_x(slots)).unwrap()
    }

    fn one() -> CMatrix {
        CMatrix::identity(1, 1)
    }

    #[test]
    fn first_derivatives() {
        let d = partial_derivative(&mono(&[1]), 1).unwrap();
        assert_eq!(d.len(), 1);
        assert!(d.coefficient(&[Word::empty(), Word::empty()]).is_some());
        assert!(partial_derivative(&mono(&[2]), 1).unwrap().is_zero());
        let d3 = partial_derivative(&mono(&[1, 1, 1]), 1).unwrap();
        let mut expect = TensorPoly::zero(2, ab(), CoeffAlgebra::Scalar);
        for j in 0..3 {
            expect
                .add_term(
                    vec![Word::from_x(&vec![1; j]), Word::from_x(&vec![1; 2 - j])],
                    one(),
                )
                .unwrap();
        }
        assert_eq!(d3, expect);
        assert!(partial_derivative(&mono(&[1]), 3).is_err());
    }

    #[test]
    fn second_derivative_of_square() {
        let d = higher_derivative(&mono(&[1, 1]), &[1, 1]).unwrap();
        // Only the split of the first letter leaves an X_1 in the last slot.
        assert_eq!(d.len(), 1);
        assert!(d
            .coefficient(&[Word::empty(), Word::empty(), Word::empty()])
            .is_some());
        assert!(higher_derivative(&mono(&[1, 1]), &[1, 1, 1])
            .unwrap()
            .is_zero());
    }

    #[test]
    fn power_expansion_of_x_cubed() {
        let t = power_derivative_expansion(&mono(&[1]), &[1], 3).unwrap();
        let direct = partial_derivative(&mono(&[1, 1, 1]), 1).unwrap();
        assert_eq!(t, direct);
    }

    #[test]
    fn zero_power_rejected() {
        assert!(power_derivative_expansion(&mono(&[1]), &[1], 0).is_err());
        assert!(power_derivative_expansion(&mono(&[1]), &[], 2).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn leibniz(seed in 0u64..10_000, i in 1usize..=2) {
            let mut r = rng(seed);
            for alg in [CoeffAlgebra::Scalar, CoeffAlgebra::Matrix(2)] {
                let p = random_poly(&mut r, 2, alg, 4, 4);
                let q = random_poly(&mut r, 2, alg, 4, 4);
                let lhs = partial_derivative(&p.mul(&q).unwrap(), i).unwrap();
                let rhs = partial_derivative(&p, i).unwrap().mul_right(&q).unwrap()
                    .add(&partial_derivative(&q, i).unwrap().mul_left(&p).unwrap()).unwrap();
                prop_assert!(lhs.approx_eq(&rhs, 1e-12));
            }
        }

        #[test]
        fn adjoint_is_antihomomorphism(seed in 0u64..10_000) {
            let mut r = rng(seed);
            let p = random_poly(&mut r, 2, CoeffAlgebra::Matrix(2), 3, 4);
            let q = random_poly(&mut r, 2, CoeffAlgebra::Matrix(2), 3, 4);
            let lhs = p.mul(&q).unwrap().adjoint();
            let rhs = q.adjoint().mul(&p.adjoint()).unwrap();
            prop_assert!(lhs.approx_eq(&rhs, 1e-12));
            prop_assert_eq!(p.adjoint().adjoint(), p);
        }

        #[test]
        fn power_expansion_matches_direct(seed in 0u64..10_000, k in 1usize..=3, r in 1usize..=2) {
            let mut g = rng(seed);
            let p = random_poly(&mut g, 2, CoeffAlgebra::Matrix(2), 3, 3);
            let z: Vec<usize> = (0..r).map(|t| 1 + (seed as usize >> t) % 2).collect();
            let lhs = power_derivative_expansion(&p, &z, k).unwrap();
            let rhs = higher_derivative(&p.pow(k), &z).unwrap();
            prop_assert!(lhs.approx_eq(&rhs, 1e-9), "diff {}", lhs.max_abs_diff(&rhs));
            if k == 1 {
                prop_assert!(lhs.approx_eq(&higher_derivative(&p, &z).unwrap(), 1e-12));
            }
        }

        #[test]
        fn derivative_ranks_and_lengths(slots in proptest::collection::vec(1usize..=2, 0..7),
                                        idx in proptest::collection::vec(1usize..=2, 1..4)) {
            let t = higher_derivative(&mono(&slots), &idx).unwrap();
            prop_assert_eq!(t.rank(), idx.len() + 1);
            for (s, _) in t.terms() {
                let total: usize = s.iter().map(Word::len).sum();
                prop_assert_eq!(total, slots.len() - idx.len());
            }
        }
    }
}
