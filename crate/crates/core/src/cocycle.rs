//! Cocycle spaces of a monodromy tuple and the linear maps induced on them
//! by braids.
//!
//! For `g = (g_1, …, g_r)` acting on `V = k^n` with `g_1 ⋯ g_r = 1`:
//!
//! * `H_g ⊆ V^r` is the set of `(v_1, …, v_r)` with `v_i ∈ Im(g_i - 1)` and
//!   `v_1·g_2⋯g_r + v_2·g_3⋯g_r + ⋯ + v_r = 0`;
//! * `E_g = {(v·(g_1 - 1), …, v·(g_r - 1))}` is the coboundary part;
//! * `W_g = H_g / E_g`.
//!
//! A braid `w` induces `M(g, w) ∈ End(V^r)` mapping `H_g → H_{g^w}` and
//! `E_g → E_{g^w}`; its action on `W_g` is read off in the basis returned
//! by [`trafodat`].

use thiserror::Error;

use crate::braid::{act_letter, act_on_tuple, tuple_product, BraidError, BraidWord};
use crate::linalg::{extend_basis, image, kernel, LinalgError, Matrix, Subspace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CocycleError {
    #[error("the product g_1⋯g_r of the monodromy tuple is not the identity")]
    ProductNotIdentity,
    #[error("monodromy tuple is empty")]
    EmptyTuple,
    #[error("monodromy tuple entries must be invertible square matrices of one size over one field")]
    ShapeMismatch,
    #[error("generator {generator} is out of range for a tuple of length {len}")]
    GeneratorOutOfRange { generator: i32, len: usize },
    #[error("consistency check failed: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Braid(#[from] BraidError),
}

/// The spaces attached to a tuple, with the adapted change of basis.
///
/// Rows `0..dim_e` of `trafodat` span `E_g`, rows `0..dim_h` span `H_g`,
/// and all rows together form a basis of `V^r`.
#[derive(Debug, Clone)]
pub struct TupleSpaces {
    pub h: Subspace,
    pub e: Subspace,
    pub trafodat: Matrix,
    pub trafodat_inverse: Matrix,
}

impl TupleSpaces {
    pub fn dim_e(&self) -> usize {
        self.e.dim()
    }

    pub fn dim_h(&self) -> usize {
        self.h.dim()
    }

    pub fn dim_w(&self) -> usize {
        self.dim_h() - self.dim_e()
    }
}

/// Check shapes and return `(n, r)`.
fn tuple_shape(g: &[Matrix]) -> Result<(usize, usize), CocycleError> {
    let first = g.first().ok_or(CocycleError::EmptyTuple)?;
    let n = first.rows();
    if g.iter().any(|m| m.shape() != (n, n) || m.field() != first.field()) {
        return Err(CocycleError::ShapeMismatch);
    }
    Ok((n, g.len()))
}

fn check_product(g: &[Matrix]) -> Result<(usize, usize), CocycleError> {
    let shape = tuple_shape(g)?;
    if !tuple_product(g).expect("nonempty").is_identity() {
        return Err(CocycleError::ProductNotIdentity);
    }
    Ok(shape)
}

/// `⊕_i Im(g_i - 1)` inside `V^r`.
pub fn images_of_g_minus_one(g: &[Matrix]) -> Result<Subspace, CocycleError> {
    let (n, r) = tuple_shape(g)?;
    let k = g[0].field();
    let mut rows = Vec::new();
    for (i, gi) in g.iter().enumerate() {
        for b in image(&gi.minus_identity()).basis().row_vectors() {
            let mut v = vec![k.zero(); n * r];
            v[i * n..(i + 1) * n].clone_from_slice(b);
            rows.push(v);
        }
    }
    Ok(Subspace::span_of_vectors(k, n * r, &rows)?)
}

/// Matrix of `(v_1, …, v_r) ↦ Σ v_i·g_{i+1}⋯g_r`, stacked as an `nr × n`
/// column of blocks.
pub fn stacked_tail_products(g: &[Matrix]) -> Result<Matrix, CocycleError> {
    let (n, r) = tuple_shape(g)?;
    let k = g[0].field();
    let mut a = Matrix::zeros(k, n * r, n);
    let mut tail = Matrix::identity(k, n);
    for i in (0..r).rev() {
        a.insert_block(&tail, i * n + 1, 1)?;
        tail = &g[i] * &tail;
    }
    Ok(a)
}

pub fn compute_h(g: &[Matrix]) -> Result<Subspace, CocycleError> {
    check_product(g)?;
    let h1 = images_of_g_minus_one(g)?;
    let h2 = kernel(&stacked_tail_products(g)?);
    Ok(h1.intersect(&h2)?)
}

pub fn compute_e(g: &[Matrix]) -> Result<Subspace, CocycleError> {
    check_product(g)?;
    let joined = g
        .iter()
        .map(Matrix::minus_identity)
        .reduce(|acc, m| acc.hstack(&m).expect("equal row counts"))
        .expect("nonempty");
    Ok(image(&joined))
}

pub fn trafodat(g: &[Matrix]) -> Result<TupleSpaces, CocycleError> {
    let (n, r) = check_product(g)?;
    let e = compute_e(g)?;
    let h = compute_h(g)?;
    if !h.contains(&e)? {
        return Err(CocycleError::Inconsistent("E_g is not contained in H_g".into()));
    }
    let t = extend_basis(&e, &h, n * r)?;
    let t_inv = t.inverse()?;
    Ok(TupleSpaces { h, e, trafodat: t, trafodat_inverse: t_inv })
}

fn generator_index(g: &[Matrix], i: i32) -> Result<usize, CocycleError> {
    let idx = i.unsigned_abs() as usize;
    if i == 0 || idx >= g.len() {
        return Err(CocycleError::GeneratorOutOfRange { generator: i, len: g.len() });
    }
    Ok(idx)
}

/// `M(g, b_i)` for `i > 0` and `M(g, b_i^-1)` for `i < 0`, from the closed
/// forms. The `2n × 2n` block at rows/columns `(|i|-1)n ..` is
///
/// ```text
/// b_i:     [ 0   g_{i+1}                      ]   b_i^-1: [ (g_{i+1} - 1) g_i^-1   1 ]
///          [ 1   1 - g_{i+1}^-1 g_i g_{i+1}   ]           [ g_i^-1                 0 ]
/// ```
pub fn local_matrix(g: &[Matrix], i: i32) -> Result<Matrix, CocycleError> {
    let (n, r) = tuple_shape(g)?;
    let idx = generator_index(g, i)?;
    let k = g[0].field();
    let (gi, gj) = (&g[idx - 1], &g[idx]);
    let id = Matrix::identity(k, n);
    let mut m = Matrix::identity(k, n * r);
    let at = (idx - 1) * n + 1;
    if i > 0 {
        let conj = &(&gj.inverse()? * gi) * gj;
        m.insert_block(&Matrix::zeros(k, n, n), at, at)?;
        m.insert_block(gj, at, at + n)?;
        m.insert_block(&id, at + n, at)?;
        m.insert_block(&(&id - &conj), at + n, at + n)?;
    } else {
        let gi_inv = gi.inverse()?;
        m.insert_block(&(&gj.minus_identity() * &gi_inv), at, at)?;
        m.insert_block(&id, at, at + n)?;
        m.insert_block(&gi_inv, at + n, at)?;
        m.insert_block(&Matrix::zeros(k, n, n), at + n, at + n)?;
    }
    debug_assert!(i > 0 || m == local_matrix_by_inversion(g, i).expect("same preconditions"));
    Ok(m)
}

/// `M(g, b_i^-1)` computed as `M(g^{b_i^-1}, b_i)^-1`; for `i > 0` this is
/// just the closed form.
pub fn local_matrix_by_inversion(g: &[Matrix], i: i32) -> Result<Matrix, CocycleError> {
    if i > 0 {
        return local_matrix(g, i);
    }
    generator_index(g, i)?;
    let mut moved = g.to_vec();
    act_letter(&mut moved, i)?;
    Ok(local_matrix(&moved, -i)?.inverse()?)
}

/// `M(g, w)`: the product of the local matrices, advancing the tuple by the
/// action after each letter. The empty word gives the identity.
pub fn word_matrix(g: &[Matrix], w: &BraidWord) -> Result<Matrix, CocycleError> {
    let (n, r) = tuple_shape(g)?;
    if w.strands() != r {
        return Err(BraidError::TupleLength { len: r, strands: w.strands() }.into());
    }
    let mut current = g.to_vec();
    let mut acc = Matrix::identity(g[0].field(), n * r);
    for &l in w.letters() {
        acc = &acc * &local_matrix(&current, l)?;
        act_letter(&mut current, l)?;
    }
    Ok(acc)
}

/// The middle block of `T·P·T^-1`: the map induced by `P` on `H/E` in the
/// basis given by rows `dim_e..dim_h` of `T`, with `T` the source tuple's
/// adapted basis on both sides.
pub fn induced_block(spaces: &TupleSpaces, p: &Matrix) -> Result<Matrix, CocycleError> {
    let conj = &(&spaces.trafodat * p) * &spaces.trafodat_inverse;
    let (de, dw) = (spaces.dim_e(), spaces.dim_w());
    Ok(conj.extract_block(de + 1, de + 1, dw, dw)?)
}

/// `Φ̄(g, w)` on `W_g`.
pub fn phibar(g: &[Matrix], w: &BraidWord) -> Result<Matrix, CocycleError> {
    let spaces = trafodat(g)?;
    phibar_with(&spaces, g, w)
}

pub fn phibar_with(spaces: &TupleSpaces, g: &[Matrix], w: &BraidWord) -> Result<Matrix, CocycleError> {
    induced_block(spaces, &word_matrix(g, w)?)
}

/// Verify that `M(g, w)` maps `H_g` into `H_{g^w}` and `E_g` into
/// `E_{g^w}`, and, when `g^w = g`, that the conjugated matrix is block
/// triangular with respect to the flag `E ⊆ H ⊆ V^r`.
pub fn check_stability(g: &[Matrix], w: &BraidWord, m: &Matrix) -> Result<(), CocycleError> {
    let moved = act_on_tuple(g, w)?;
    let (h, e) = (compute_h(g)?, compute_e(g)?);
    let (h2, e2) = (compute_h(&moved)?, compute_e(&moved)?);
    if !h2.contains(&h.image_under(m)?)? {
        return Err(CocycleError::Inconsistent(format!("M(g, {w}) does not map H_g into H_(g^w)")));
    }
    if !e2.contains(&e.image_under(m)?)? {
        return Err(CocycleError::Inconsistent(format!("M(g, {w}) does not map E_g into E_(g^w)")));
    }
    if moved == g {
        let spaces = trafodat(g)?;
        let conj = &(&spaces.trafodat * m) * &spaces.trafodat_inverse;
        let (de, dh, total) = (spaces.dim_e(), spaces.dim_h(), conj.rows());
        let vanishes = |rows: std::ops::Range<usize>, cols: std::ops::Range<usize>| {
            rows.clone().all(|a| cols.clone().all(|b| conj.field().is_zero(conj.get(a, b))))
        };
        if !vanishes(0..de, de..total) || !vanishes(de..dh, dh..total) {
            return Err(CocycleError::Inconsistent(format!("M(g, {w}) is not block triangular in the adapted basis")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;

    fn scalars(k: &FieldSpec, x: &crate::field::FieldElement, r: usize) -> Vec<Matrix> {
        vec![Matrix::scalar(k, 1, x); r]
    }

    #[test]
    fn four_minus_ones() {
        let k = FieldSpec::rational();
        let g = scalars(&k, &k.from_i64(-1), 4);
        let h2 = kernel(&stacked_tail_products(&g).unwrap());
        assert_eq!(h2.dim(), 3);
        // Oracle: -v1 + v2 - v3 + v4 = 0 cuts out a hyperplane of k^4.
        let normal = [-1i64, 1, -1, 1];
        for b in h2.basis().row_vectors() {
            let s = b.iter().zip(normal).fold(k.zero(), |acc, (x, c)| k.add(&acc, &k.mul(x, &k.from_i64(c))));
            assert!(k.is_zero(&s));
        }
        assert_eq!(compute_h(&g).unwrap().dim(), 3);
        let e = compute_e(&g).unwrap();
        assert_eq!(e.basis(), &Matrix::from_ints(&k, &[[1, 1, 1, 1]]));
        let spaces = trafodat(&g).unwrap();
        assert_eq!((spaces.dim_e(), spaces.dim_h(), spaces.dim_w()), (1, 3, 2));
    }

    #[test]
    fn six_sixth_roots() {
        let k = FieldSpec::cyclotomic(6).unwrap();
        let g = scalars(&k, &k.zeta().unwrap(), 6);
        assert_eq!(compute_h(&g).unwrap().dim(), 5);
        assert_eq!(compute_e(&g).unwrap().dim(), 1);
        let spaces = trafodat(&g).unwrap();
        assert_eq!(spaces.dim_w(), 4);
    }

    #[test]
    fn identity_tuple() {
        let k = FieldSpec::rational();
        let g = scalars(&k, &k.one(), 2);
        assert_eq!(compute_h(&g).unwrap().dim(), 0);
        assert_eq!(compute_e(&g).unwrap().dim(), 0);
        let spaces = trafodat(&g).unwrap();
        assert_eq!(spaces.dim_w(), 0);
        let swap = local_matrix(&g, 1).unwrap();
        assert_eq!(swap, Matrix::from_ints(&k, &[[0, 1], [1, 0]]));
        assert_eq!(local_matrix(&g, -1).unwrap(), swap);
    }

    #[test]
    fn product_must_be_identity() {
        let k = FieldSpec::rational();
        let g = scalars(&k, &k.from_i64(-1), 3);
        assert_eq!(compute_h(&g).unwrap_err(), CocycleError::ProductNotIdentity);
        assert_eq!(trafodat(&g).unwrap_err(), CocycleError::ProductNotIdentity);
    }

    #[test]
    fn local_matrices_for_minus_ones() {
        let k = FieldSpec::rational();
        let g = scalars(&k, &k.from_i64(-1), 4);
        let m1 = local_matrix(&g, 1).unwrap();
        let mut expected = Matrix::identity(&k, 4);
        expected.insert_block(&Matrix::from_ints(&k, &[[0, -1], [1, 2]]), 1, 1).unwrap();
        assert_eq!(m1, expected);
        let m3 = local_matrix(&g, 3).unwrap();
        assert_eq!(m3.extract_block(3, 3, 2, 2).unwrap(), Matrix::from_ints(&k, &[[0, -1], [1, 2]]));
        for i in 1..4 {
            let moved = act_on_tuple(&g, &BraidWord::new(4, vec![i]).unwrap()).unwrap();
            let prod = &local_matrix(&g, i).unwrap() * &local_matrix(&moved, -i).unwrap();
            assert!(prod.is_identity());
            assert_eq!(local_matrix(&g, -i).unwrap(), local_matrix_by_inversion(&g, -i).unwrap());
        }
        let sq = word_matrix(&g, &BraidWord::new(4, vec![1, 1]).unwrap()).unwrap();
        assert_eq!(sq.extract_block(1, 1, 2, 2).unwrap(), Matrix::from_ints(&k, &[[-1, -2], [2, 3]]));
        assert!(matches!(local_matrix(&g, 4), Err(CocycleError::GeneratorOutOfRange { generator: 4, len: 4 })));
        assert!(matches!(local_matrix(&g, 0), Err(CocycleError::GeneratorOutOfRange { .. })));
    }

    #[test]
    fn word_matrix_edge_cases() {
        let k = FieldSpec::rational();
        let g = scalars(&k, &k.from_i64(-1), 4);
        assert!(word_matrix(&g, &BraidWord::empty(4)).unwrap().is_identity());
        let w = BraidWord::new(4, vec![1, -2, 3, 3, -1]).unwrap();
        let round = word_matrix(&g, &w.concat(&w.inverse()).unwrap()).unwrap();
        assert!(round.is_identity());
        assert!(phibar(&g, &BraidWord::empty(4)).unwrap().is_identity());
        let p = phibar(&g, &w).unwrap();
        let q = phibar(&g, &w.inverse()).unwrap();
        assert!((&p * &q).is_identity());
        check_stability(&g, &w, &word_matrix(&g, &w).unwrap()).unwrap();
    }
}
