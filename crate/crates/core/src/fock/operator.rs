use super::basis::FockBasis;
use super::vector::{BaseVector, FockVector, Letter};
use crate::linalg;
use crate::ncalg::{GenKind, NcPoly, Word};
use crate::{CMatrix, Error, Result, C64};

/// Dense matrix of an operator on a depth-`D` truncated Fock space.
#[derive(Clone, Debug, PartialEq)]
pub struct FockOperator {
    basis: FockBasis,
    matrix: CMatrix,
}

impl FockOperator {
    pub fn identity(basis: &FockBasis) -> Self {
        FockOperator {
            basis: basis.clone(),
            matrix: CMatrix::identity(basis.dim(), basis.dim()),
        }
    }

    pub fn from_matrix(basis: &FockBasis, matrix: CMatrix) -> Result<Self> {
        if matrix.shape() != (basis.dim(), basis.dim()) {
            return Err(Error::DimensionMismatch(format!(
                "matrix {:?} on a basis of dimension {}",
                matrix.shape(),
                basis.dim()
            )));
        }
        Ok(FockOperator {
            basis: basis.clone(),
            matrix,
        })
    }

    /// Truncated matrix of an elementary operator.
    pub fn from_letter(basis: &FockBasis, letter: &Letter) -> Result<Self> {
        check_letter(basis, letter)?;
        let n = basis.dim();
        let mut mat = CMatrix::zeros(n, n);
        for b in 0..n {
            let v = FockVector::basis_word(basis.base_dim(), &basis.word(b));
            let w = v.apply(letter, Some(basis.depth()));
            for (l, p, z) in w.entries() {
                mat[(basis.level_range(l).start + p as usize, b)] = z;
            }
        }
        Ok(FockOperator {
            basis: basis.clone(),
            matrix: mat,
        })
    }

    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    fn same_basis(&self, other: &FockOperator) -> Result<()> {
        if self.basis == other.basis {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(
                "operators on different Fock bases".into(),
            ))
        }
    }

    pub fn mul(&self, other: &FockOperator) -> Result<FockOperator> {
        self.same_basis(other)?;
        Ok(FockOperator {
            basis: self.basis.clone(),
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn add(&self, other: &FockOperator) -> Result<FockOperator> {
        self.same_basis(other)?;
        Ok(FockOperator {
            basis: self.basis.clone(),
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn scale(&self, s: C64) -> FockOperator {
        FockOperator {
            basis: self.basis.clone(),
            matrix: &self.matrix * s,
        }
    }

    pub fn adjoint(&self) -> FockOperator {
        FockOperator {
            basis: self.basis.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    /// `<T Omega, Omega>`.
    pub fn vacuum_trace(&self) -> C64 {
        self.matrix[(0, 0)]
    }

    pub fn op_norm(&self) -> Result<f64> {
        linalg::op_norm(&self.matrix)
    }
}

fn check_vector(basis: &FockBasis, xi: &BaseVector) -> Result<()> {
    if xi.dim != basis.base_dim() {
        return Err(Error::DimensionMismatch(format!(
            "base vector of dimension {} for base space of dimension {}",
            xi.dim,
            basis.base_dim()
        )));
    }
    Ok(())
}

fn check_letter(basis: &FockBasis, letter: &Letter) -> Result<()> {
    match letter {
        Letter::Create(x)
        | Letter::Annihilate(x)
        | Letter::RightCreate(x)
        | Letter::RightAnnihilate(x)
        | Letter::Semicircular(x) => check_vector(basis, x),
        Letter::Projection(l) if *l > basis.depth() => Err(Error::IndexOutOfRange(format!(
            "level {l} above depth {}",
            basis.depth()
        ))),
        Letter::Delta(k) if k.abs() > 1.0 => Err(Error::InvalidInput(format!(
            "|kappa| = {} exceeds 1",
            k.abs()
        ))),
        _ => Ok(()),
    }
}

/// `l(xi)`.
pub fn creation(basis: &FockBasis, xi: &BaseVector) -> Result<FockOperator> {
    FockOperator::from_letter(basis, &Letter::Create(xi.clone()))
}

/// `r(xi)`.
pub fn right_creation(basis: &FockBasis, xi: &BaseVector) -> Result<FockOperator> {
    FockOperator::from_letter(basis, &Letter::RightCreate(xi.clone()))
}

/// `l(xi) + l(xi)^*`.
pub fn semicircular_op(basis: &FockBasis, xi: &BaseVector) -> Result<FockOperator> {
    FockOperator::from_letter(basis, &Letter::Semicircular(xi.clone()))
}

/// `P_l`.
pub fn level_projection(basis: &FockBasis, l: usize) -> Result<FockOperator> {
    FockOperator::from_letter(basis, &Letter::Projection(l))
}

/// `Delta(kappa) = sum_{l=1}^{D} kappa^l P_l`.
pub fn delta_op(basis: &FockBasis, kappa: f64) -> Result<FockOperator> {
    FockOperator::from_letter(basis, &Letter::Delta(kappa))
}

/// Generator values for [`evaluate_poly`]: semicircular letters map to Fock
/// operators, deterministic letters to matrices on an auxiliary space.
#[derive(Clone, Debug)]
pub struct Assignment {
    pub basis: FockBasis,
    pub x: Vec<FockOperator>,
    pub z: Vec<CMatrix>,
}

impl Assignment {
    pub fn new(basis: &FockBasis, x: Vec<FockOperator>) -> Self {
        Assignment {
            basis: basis.clone(),
            x,
            z: Vec::new(),
        }
    }

    /// The free semicircular system `x_i = l(e_i) + l(e_i)^*`, `m = d`.
    pub fn free_semicircular(basis: &FockBasis, d: usize) -> Result<Self> {
        let x = (0..d)
            .map(|i| semicircular_op(basis, &BaseVector::unit(basis.base_dim(), i)))
            .collect::<Result<_>>()?;
        Ok(Self::new(basis, x))
    }

    pub fn with_deterministic(mut self, z: Vec<CMatrix>) -> Self {
        self.z = z;
        self
    }

    pub fn aux_dim(&self) -> usize {
        self.z.first().map_or(1, |m| m.nrows())
    }
}

/// `sum_M a_M (x) M(assigned)` on `coeff (x) aux (x) F_{<=D}`, laid out as
/// nested Kronecker products in that order.
pub fn evaluate_poly(p: &NcPoly, asg: &Assignment) -> Result<CMatrix> {
    let fdim = asg.basis.dim();
    let aux = asg.aux_dim();
    for x in &asg.x {
        if x.basis != asg.basis {
            return Err(Error::DimensionMismatch(
                "assigned operators on different bases".into(),
            ));
        }
    }
    if asg.z.iter().any(|z| z.shape() != (aux, aux)) {
        return Err(Error::DimensionMismatch(
            "deterministic matrices of unequal size".into(),
        ));
    }
    let inner = aux * fdim;
    let id_f = CMatrix::identity(fdim, fdim);
    let id_aux = CMatrix::identity(aux, aux);
    let lifted_x: Vec<CMatrix> = asg.x.iter().map(|x| id_aux.kronecker(&x.matrix)).collect();
    let lifted_z: Vec<CMatrix> = asg.z.iter().map(|z| z.kronecker(&id_f)).collect();
    let c = p.algebra().dim();
    let mut out = CMatrix::zeros(c * inner, c * inner);
    for (w, a) in p.terms() {
        let mut op = CMatrix::identity(inner, inner);
        for g in w.letters() {
            let factor = match g.kind {
                GenKind::Semicircular => lifted_x.get(g.index - 1),
                GenKind::Deterministic => lifted_z.get(g.index - 1),
            }
            .ok_or_else(|| Error::InvalidInput(format!("generator {g} is unassigned")))?;
            op *= factor;
        }
        out += a.kronecker(&op);
    }
    Ok(out)
}

/// `id (x) tau`: the block matrix `<T Omega, Omega>` over the outer factors
/// when `T` acts on `outer (x) F` with Fock dimension `fock_dim`.
pub fn partial_vacuum_trace(t: &CMatrix, fock_dim: usize) -> Result<CMatrix> {
    if fock_dim == 0 || !t.nrows().is_multiple_of(fock_dim) || !t.is_square() {
        return Err(Error::DimensionMismatch(
            "operator does not factor over the Fock space".into(),
        ));
    }
    let outer = t.nrows() / fock_dim;
    Ok(CMatrix::from_fn(outer, outer, |a, b| {
        t[(a * fock_dim, b * fock_dim)]
    }))
}

/// Matrix-free model of generators for compressed evaluations: `X_i` acts
/// as `l(xi_i) + l(xi_i)^*` on the untruncated Fock space over `C^m`, and
/// `Z_j` as `zs[j]` on an auxiliary factor.
#[derive(Clone, Debug)]
pub struct FreeModel {
    pub m: usize,
    pub xs: Vec<BaseVector>,
    pub zs: Vec<CMatrix>,
}

impl FreeModel {
    /// Free semicircular system on `C^d`.
    pub fn free(d: usize) -> Self {
        FreeModel {
            m: d,
            xs: (0..d).map(|i| BaseVector::unit(d, i)).collect(),
            zs: Vec::new(),
        }
    }

    pub fn with_deterministic(mut self, zs: Vec<CMatrix>) -> Self {
        self.zs = zs;
        self
    }

    pub fn aux_dim(&self) -> usize {
        self.zs.first().map_or(1, |z| z.nrows())
    }
}

/// Matrix of `P_{<=L} W P_{<=L}` on `aux (x) F_{<=L}(C^m)`, computed with the
/// untruncated operators, so it is the exact compression.
pub fn compressed_word_matrix(
    model: &FreeModel,
    word: &Word,
    level: usize,
    basis: &FockBasis,
) -> Result<CMatrix> {
    if basis.depth() != level || basis.base_dim() != model.m {
        return Err(Error::DimensionMismatch(
            "basis does not match the compression level".into(),
        ));
    }
    let aux = model.aux_dim();
    let fdim = basis.dim();
    let letters = word.letters();
    for g in letters {
        let ok = match g.kind {
            GenKind::Semicircular => g.index <= model.xs.len(),
            GenKind::Deterministic => g.index <= model.zs.len(),
        };
        if !ok {
            return Err(Error::InvalidInput(format!("generator {g} is unassigned")));
        }
    }
    // x_before[t]: X letters left of position t, i.e. still to act after it.
    let mut x_before = vec![0usize; letters.len() + 1];
    for t in 0..letters.len() {
        x_before[t + 1] = x_before[t] + usize::from(letters[t].is_semicircular());
    }
    let mut out = CMatrix::zeros(aux * fdim, aux * fdim);
    for alpha in 0..aux {
        for b in 0..fdim {
            let mut state: Vec<FockVector> = (0..aux).map(|_| FockVector::zero(model.m)).collect();
            state[alpha] = FockVector::basis_word(model.m, &basis.word(b));
            for t in (0..letters.len()).rev() {
                let g = letters[t];
                state = match g.kind {
                    GenKind::Semicircular => {
                        let letter = Letter::Semicircular(model.xs[g.index - 1].clone());
                        state.iter().map(|v| v.apply(&letter, None)).collect()
                    }
                    GenKind::Deterministic => {
                        let z = &model.zs[g.index - 1];
                        (0..aux)
                            .map(|r| {
                                let mut acc = FockVector::zero(model.m);
                                for (s, v) in state.iter().enumerate() {
                                    if z[(r, s)] != C64::new(0.0, 0.0) {
                                        acc.add_scaled(v, z[(r, s)]);
                                    }
                                }
                                acc
                            })
                            .collect()
                    }
                };
                for v in &mut state {
                    v.truncate_above(level + x_before[t]);
                }
            }
            for (r, v) in state.iter().enumerate() {
                let dense = v.to_dense(basis);
                for (i, z) in dense.into_iter().enumerate() {
                    out[(r * fdim + i, alpha * fdim + b)] = z;
                }
            }
        }
    }
    Ok(out)
}

/// `P_{<=L} P(x, z) P_{<=L}` on `coeff (x) aux (x) F_{<=L}`. Its norm is a
/// lower bound for `||P(x, z)||` that increases to it as `L` grows.
pub fn compression(model: &FreeModel, p: &NcPoly, level: usize) -> Result<CMatrix> {
    let basis = super::basis::build_basis(model.m, level)?;
    let aux = model.aux_dim();
    let fdim = basis.dim();
    let inner = aux * fdim;
    let c = p.algebra().dim();
    for g in p.generators() {
        let ok = match g.kind {
            GenKind::Semicircular => g.index <= model.xs.len(),
            GenKind::Deterministic => g.index <= model.zs.len(),
        };
        if !ok {
            return Err(Error::InvalidInput(format!("generator {g} is unassigned")));
        }
    }
    // Words are read right to left, so the trie is keyed on reversed words.
    let mut trie = vec![TrieNode::default()];
    for (w, a) in p.terms() {
        let mut node = 0;
        let xs = w.xdegree();
        trie[0].max_x = trie[0].max_x.max(xs);
        let mut seen_x = 0;
        for g in w.letters().iter().rev() {
            seen_x += usize::from(g.is_semicircular());
            let next = match trie[node].children.iter().find(|(h, _)| h == g) {
                Some(&(_, k)) => k,
                None => {
                    trie.push(TrieNode::default());
                    let k = trie.len() - 1;
                    trie[node].children.push((*g, k));
                    k
                }
            };
            node = next;
            trie[node].max_x = trie[node].max_x.max(xs - seen_x);
        }
        trie[node].coeff = Some(a.clone());
    }
    let semis: Vec<Letter> = model
        .xs
        .iter()
        .map(|x| Letter::Semicircular(x.clone()))
        .collect();
    let mut out = CMatrix::zeros(c * inner, c * inner);
    for alpha in 0..aux {
        for b in 0..fdim {
            let mut start: Vec<FockVector> = (0..aux).map(|_| FockVector::zero(model.m)).collect();
            start[alpha] = FockVector::basis_word(model.m, &basis.word(b));
            let col = alpha * fdim + b;
            let mut stack = vec![(0usize, start)];
            while let Some((node, state)) = stack.pop() {
                if let Some(a) = &trie[node].coeff {
                    for (r, v) in state.iter().enumerate() {
                        for (lvl, pos, z) in v.entries() {
                            if lvl > level {
                                continue;
                            }
                            let row = r * fdim + basis.level_range(lvl).start + pos as usize;
                            for cr in 0..c {
                                for cc in 0..c {
                                    out[(cr * inner + row, cc * inner + col)] += a[(cr, cc)] * z;
                                }
                            }
                        }
                    }
                }
                for &(g, child) in &trie[node].children {
                    let mut next: Vec<FockVector> = match g.kind {
                        GenKind::Semicircular => state
                            .iter()
                            .map(|v| v.apply(&semis[g.index - 1], None))
                            .collect(),
                        GenKind::Deterministic => {
                            let z = &model.zs[g.index - 1];
                            (0..aux)
                                .map(|r| {
                                    let mut acc = FockVector::zero(model.m);
                                    for (s, v) in state.iter().enumerate() {
                                        if z[(r, s)] != C64::new(0.0, 0.0) {
                                            acc.add_scaled(v, z[(r, s)]);
                                        }
                                    }
                                    acc
                                })
                                .collect()
                        }
                    };
                    for v in &mut next {
                        v.truncate_above(level + trie[child].max_x);
                    }
                    if next.iter().any(|v| !v.is_zero()) {
                        stack.push((child, next));
                    }
                }
            }
        }
    }
    Ok(out)
}

#[derive(Default)]
struct TrieNode {
    children: Vec<(crate::ncalg::Generator, usize)>,
    coeff: Option<CMatrix>,
    // Most X letters still to act, over the words through this node.
    max_x: usize,
}

#[cfg(test)]
mod tests {
    use super::super::basis::build_basis;
    use super::*;
    use crate::ncalg::{parse_poly, Alphabet, CoeffAlgebra};

    fn e(m: usize, a: usize) -> BaseVector {
        BaseVector::unit(m, a)
    }

    #[test]
    fn creation_adjoint_relation() {
        let b = build_basis(2, 4).unwrap();
        let xi = BaseVector::from_dense(&[C64::new(0.6, 0.1), C64::new(-0.3, 0.2)]);
        let eta = BaseVector::from_dense(&[C64::new(0.2, -0.5), C64::new(0.7, 0.0)]);
        let lx = creation(&b, &xi).unwrap();
        let le = creation(&b, &eta).unwrap();
        let prod = lx.adjoint().mul(&le).unwrap();
        let ip = eta.inner(&xi);
        for i in 0..b.dim() {
            if b.level_of(i) < b.depth() {
                for j in 0..b.dim() {
                    let expect = if i == j { ip } else { C64::new(0.0, 0.0) };
                    assert!((prod.matrix()[(i, j)] - expect).norm() < 1e-14);
                }
            }
        }
        let ann = FockOperator::from_letter(&b, &Letter::Annihilate(xi.clone())).unwrap();
        assert_eq!(ann, lx.adjoint());
        assert_eq!(ann.matrix().column(0).norm(), 0.0);
    }

    #[test]
    fn projections_and_delta() {
        let b = build_basis(2, 3).unwrap();
        let mut sum = CMatrix::zeros(b.dim(), b.dim());
        for l in 0..=3 {
            let p = level_projection(&b, l).unwrap();
            assert_eq!(p.mul(&p).unwrap(), p);
            assert!((p.op_norm().unwrap() - 1.0).abs() < 1e-12);
            sum += p.matrix();
        }
        assert_eq!(sum, CMatrix::identity(b.dim(), b.dim()));
        assert!(level_projection(&b, 4).is_err());
        let dl = delta_op(&b, -0.7).unwrap();
        assert!((dl.op_norm().unwrap() - 0.7).abs() < 1e-12);
        assert!(delta_op(&b, 1.5).is_err());
    }

    #[test]
    fn semicircular_norm_grows_to_two() {
        let mut prev = 0.0;
        for depth in 2..=20 {
            let b = build_basis(1, depth).unwrap();
            let n = semicircular_op(&b, &e(1, 0)).unwrap().op_norm().unwrap();
            assert!(n <= 2.0 && n >= prev - 1e-12);
            prev = n;
        }
        let b = build_basis(1, 40).unwrap();
        let n = semicircular_op(&b, &e(1, 0)).unwrap().op_norm().unwrap();
        assert!((2.0 - n).abs() < 0.05);
    }

    #[test]
    fn vacuum_traces() {
        let b = build_basis(2, 4).unwrap();
        let x1 = semicircular_op(&b, &e(2, 0)).unwrap();
        let x2 = semicircular_op(&b, &e(2, 1)).unwrap();
        assert_eq!(x1.mul(&x1).unwrap().vacuum_trace(), C64::new(1.0, 0.0));
        let x4 = x1.mul(&x1).unwrap().mul(&x1).unwrap().mul(&x1).unwrap();
        assert!((x4.vacuum_trace() - C64::new(2.0, 0.0)).norm() < 1e-14);
        let alt = x1.mul(&x2).unwrap().mul(&x1).unwrap().mul(&x2).unwrap();
        assert_eq!(alt.vacuum_trace(), C64::new(0.0, 0.0));
        assert_eq!(
            creation(&b, &e(2, 0)).unwrap().vacuum_trace(),
            C64::new(0.0, 0.0)
        );
        assert_eq!(
            FockOperator::identity(&b).vacuum_trace(),
            C64::new(1.0, 0.0)
        );
    }

    #[test]
    fn matrix_coefficient_block_structure() {
        let b = build_basis(1, 3).unwrap();
        let asg = Assignment::free_semicircular(&b, 1).unwrap();
        let mut e12 = CMatrix::zeros(2, 2);
        e12[(0, 1)] = C64::new(1.0, 0.0);
        let p = NcPoly::monomial(Alphabet::semicircular(1), e12, Word::from_x(&[1])).unwrap();
        let t = evaluate_poly(&p, &asg).unwrap();
        let n = b.dim();
        assert_eq!(
            t.view((0, n), (n, n)).into_owned(),
            asg.x[0].matrix().clone()
        );
        assert_eq!(t.view((0, 0), (n, n)).norm(), 0.0);
        let tr = partial_vacuum_trace(&t, n).unwrap();
        assert_eq!(tr.norm(), 0.0);
    }

    #[test]
    fn compression_matches_truncated_product_on_low_levels() {
        let ab = Alphabet::semicircular(2);
        let p = parse_poly("X1*X2*X1 + 2*X2^2 - X1", ab, CoeffAlgebra::Scalar).unwrap();
        let model = FreeModel::free(2);
        let level = 2;
        let c = compression(&model, &p, level).unwrap();
        // Reference: dense operators at depth level + 2 restricted to levels <= L.
        let big = build_basis(2, level + 2).unwrap();
        let t = evaluate_poly(&p, &Assignment::free_semicircular(&big, 2).unwrap()).unwrap();
        let small = build_basis(2, level).unwrap().dim();
        let r = t.view((0, 0), (small, small)).into_owned();
        assert!((c - r).norm() < 1e-12);
    }

    #[test]
    fn trie_compression_matches_wordwise_sum() {
        let ab = Alphabet::new(2, 1);
        let a = CMatrix::from_fn(2, 2, |i, j| {
            C64::new(i as f64 - 0.3 * j as f64, 0.2 * (i + j) as f64)
        });
        let mut p = parse_poly(
            "X1*Z1*X2 + X2*X1 - 3*Z1 + X1^3",
            ab,
            CoeffAlgebra::Matrix(2),
        )
        .unwrap();
        p.add_term(Word::from_x(&[2, 2, 1]), a).unwrap();
        let z = CMatrix::from_fn(2, 2, |i, j| C64::new((i * 2 + j) as f64 - 1.0, 0.5));
        let model = FreeModel::free(2).with_deterministic(vec![z]);
        let level = 2;
        let basis = build_basis(2, level).unwrap();
        let mut reference = CMatrix::zeros(2 * 2 * basis.dim(), 2 * 2 * basis.dim());
        for (w, a) in p.terms() {
            reference += a.kronecker(&compressed_word_matrix(&model, w, level, &basis).unwrap());
        }
        assert!((compression(&model, &p, level).unwrap() - reference).norm() < 1e-12);
    }
}
