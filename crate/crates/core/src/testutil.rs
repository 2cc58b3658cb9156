use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ncalg::{Alphabet, CoeffAlgebra, NcPoly, Word};
use crate::{CMatrix, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_coeff(rng: &mut ChaCha8Rng, m: usize) -> CMatrix {
    CMatrix::from_fn(m, m, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

pub fn random_word(rng: &mut ChaCha8Rng, d: usize, len: usize) -> Word {
    Word::from_x(
        &(0..len)
            .map(|_| rng.random_range(1..=d))
            .collect::<Vec<_>>(),
    )
}

/// Random X-only polynomial with `terms` terms of length at most `max_len`.
pub fn random_poly(
    rng: &mut ChaCha8Rng,
    d: usize,
    alg: CoeffAlgebra,
    max_len: usize,
    terms: usize,
) -> NcPoly {
    let mut p = NcPoly::zero(Alphabet::semicircular(d), alg);
    for _ in 0..terms {
        let len = rng.random_range(0..=max_len);
        let w = random_word(rng, d, len);
        let c = random_coeff(rng, alg.dim());
        p.add_term(w, c).unwrap();
    }
    p
}
