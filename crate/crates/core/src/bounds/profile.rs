use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fock::{build_basis, compressed_word_matrix, compression, FockBasis, FreeModel};
use crate::linalg::op_norm;
use crate::ncalg::{higher_derivative, NcPoly, Word};
use crate::{CMatrix, Error, Result};

/// Upper limit on tensor slots, matching the largest derivative order profiled.
pub const MAX_PROFILE_ORDER: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileParams {
    /// Largest matrix dimension formed for one norm evaluation.
    pub dim_budget: usize,
    /// Cap on the compression level of a single slot.
    pub max_level: usize,
}

impl Default for ProfileParams {
    fn default() -> Self {
        ProfileParams {
            dim_budget: 1024,
            max_level: 512,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivativeNormProfile {
    /// `values[i]` for `i <= min(deg, i_max)`; orders above `deg` vanish.
    pub values: Vec<f64>,
    /// Compression level used per slot for each order.
    pub levels: Vec<usize>,
    pub degree: usize,
}

impl DerivativeNormProfile {
    /// `S_i`, zero past the degree. `None` if `i` was not computed.
    pub fn get(&self, i: usize) -> Option<f64> {
        if i > self.degree {
            Some(0.0)
        } else {
            self.values.get(i).copied()
        }
    }
}

fn fock_dim(d: usize, level: usize) -> usize {
    if d == 1 {
        level + 1
    } else {
        (d.pow(level as u32 + 1) - 1) / (d - 1)
    }
}

/// Largest level `L` with `c * dim F_{<=L}(C^d)^slots <= budget` (at least 0).
pub fn level_for_budget(d: usize, slots: usize, c: usize, budget: usize) -> usize {
    let fits = |l: usize| {
        let f = fock_dim(d, l) as f64;
        c as f64 * f.powi(slots as i32) <= budget as f64
    };
    let mut l = 0;
    while l < 4096 && fits(l + 1) {
        l += 1;
    }
    l
}

/// Spectral norm of `sum a (x) C(W_1) (x) .. (x) C(W_k)` with each slot compressed.
fn tensor_norm<'a, I>(terms: I, model: &FreeModel, level: usize, basis: &FockBasis) -> Result<f64>
where
    I: Iterator<Item = (&'a [Word], &'a CMatrix)>,
{
    let mut cache: HashMap<Word, CMatrix> = HashMap::new();
    let mut total: Option<CMatrix> = None;
    for (slots, a) in terms {
        let mut m = a.clone();
        for w in slots {
            if !cache.contains_key(w) {
                cache.insert(w.clone(), compressed_word_matrix(model, w, level, basis)?);
            }
            m = m.kronecker(&cache[w]);
        }
        match &mut total {
            Some(t) => *t += m,
            None => total = Some(m),
        }
    }
    total.map_or(Ok(0.0), |t| op_norm(&t))
}

/// Norms of the tensored higher derivatives, maximized over index tuples.
///
/// Every value is the norm of a compression, hence a lower bound on the
/// minimal-tensor norm it estimates.
pub fn derivative_norm_profile(
    p: &NcPoly,
    params: &ProfileParams,
    i_max: usize,
) -> Result<DerivativeNormProfile> {
    if i_max > MAX_PROFILE_ORDER {
        return Err(Error::Capacity(format!(
            "derivative profiles are limited to order {MAX_PROFILE_ORDER}, got {i_max}"
        )));
    }
    if p.has_deterministic() {
        return Err(Error::InvalidInput(
            "profiles take X-only polynomials".into(),
        ));
    }
    let d = p.alphabet().d.max(1);
    let c = p.algebra().dim();
    let degree = p.degree().unwrap_or(0);
    let model = FreeModel::free(d);
    let top = degree.min(i_max);
    let mut values = Vec::with_capacity(top + 1);
    let mut levels = Vec::with_capacity(top + 1);
    for i in 0..=top {
        let level = level_for_budget(d, i + 1, c, params.dim_budget).min(params.max_level);
        levels.push(level);
        if i == 0 {
            values.push(if p.is_zero() {
                0.0
            } else {
                op_norm(&compression(&model, p, level)?)?
            });
            continue;
        }
        let basis = build_basis(d, level)?;
        let tuples: Vec<Vec<usize>> = (0..d.pow(i as u32))
            .map(|mut code| {
                let mut t = vec![0; i];
                for slot in t.iter_mut().rev() {
                    *slot = code % d + 1;
                    code /= d;
                }
                t
            })
            .collect();
        let best = tuples
            .par_iter()
            .map(|t| {
                let tensor = higher_derivative(p, t)?;
                tensor_norm(tensor.terms(), &model, level, &basis)
            })
            .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))?;
        values.push(best);
    }
    Ok(DerivativeNormProfile {
        values,
        levels,
        degree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncalg::{parse_poly, Alphabet, CoeffAlgebra};
    use crate::C64;

    #[test]
    fn single_semicircular() {
        let p = parse_poly("X1", Alphabet::semicircular(1), CoeffAlgebra::Scalar).unwrap();
        let prof = derivative_norm_profile(&p, &ProfileParams::default(), 3).unwrap();
        // Compression of the Jacobi matrix at level L has norm 2cos(pi/(L+2)).
        let l = prof.levels[0] as f64;
        assert!((prof.values[0] - 2.0 * (std::f64::consts::PI / (l + 2.0)).cos()).abs() < 1e-10);
        assert!((prof.values[0] - 2.0).abs() < 1e-3);
        assert!((prof.values[1] - 1.0).abs() < 1e-12);
        assert_eq!(prof.get(2), Some(0.0));
    }

    #[test]
    fn constants_and_homogeneity() {
        let ab = Alphabet::semicircular(2);
        let k = parse_poly("3 - 4i", ab, CoeffAlgebra::Scalar).unwrap();
        let prof = derivative_norm_profile(&k, &ProfileParams::default(), 3).unwrap();
        assert_eq!(prof.values.len(), 1);
        assert!((prof.values[0] - 5.0).abs() < 1e-12);
        assert_eq!(prof.get(1), Some(0.0));
        let p = parse_poly("X1*X2*X1 + 2i*X2^2 - X1", ab, CoeffAlgebra::Scalar).unwrap();
        let a = derivative_norm_profile(&p, &ProfileParams::default(), 3).unwrap();
        let b =
            derivative_norm_profile(&p.scale(C64::new(0.0, -2.5)), &ProfileParams::default(), 3)
                .unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((2.5 * x - y).abs() < 1e-9 * y.max(1.0));
        }
        assert!(derivative_norm_profile(&p, &ProfileParams::default(), 4).is_err());
    }

    #[test]
    fn second_derivative_of_a_square() {
        // d_1 d_1 (X1^2) = 1 (x) 1 (x) 1 after one slot merge: norm 1.
        let p = parse_poly("X1^2", Alphabet::semicircular(2), CoeffAlgebra::Scalar).unwrap();
        let prof = derivative_norm_profile(&p, &ProfileParams::default(), 2).unwrap();
        assert!((prof.values[2] - 1.0).abs() < 1e-12);
        // d_1 X1^2 = 1 (x) X1 + X1 (x) 1: norm of a (x) 1 + 1 (x) a is 2||a||, approached from below.
        assert!(prof.values[1] <= 4.0 + 1e-12 && prof.values[1] > 3.0);
    }
}
