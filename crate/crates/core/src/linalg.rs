//! Dense exact linear algebra over a [`FieldSpec`].
//!
//! Vectors are rows and matrices act on them from the right: `v ↦ v·A`.
//! Images are row spaces and kernels are left kernels `{v : v·A = 0}`.
//! Subspaces are stored by their reduced row-echelon basis, so two equal
//! subspaces compare equal structurally.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use thiserror::Error;

use crate::field::{write_key, FieldElement, FieldError, FieldSpec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("shape mismatch in {op}: {left:?} vs {right:?}")]
    ShapeMismatch { op: &'static str, left: (usize, usize), right: (usize, usize) },
    #[error("matrix is singular")]
    Singular,
    #[error("block of size {size:?} at {at:?} does not fit in a {shape:?} matrix")]
    BlockOutOfRange { at: (usize, usize), size: (usize, usize), shape: (usize, usize) },
    #[error("subspaces live in ambient spaces of dimension {0} and {1}")]
    AmbientMismatch(usize, usize),
    #[error("inner subspace is not contained in the outer subspace")]
    NotNested,
    #[error("operands are defined over different fields ({0} vs {1})")]
    FieldMismatch(String, String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A dense row-major matrix over a field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix over {} ", self.field)?;
        f.debug_list().entries(self.to_strings()).finish()
    }
}

impl Matrix {
    pub fn new(field: &FieldSpec, rows: usize, cols: usize, data: Vec<FieldElement>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::ShapeMismatch { op: "new", left: (rows, cols), right: (data.len(), 1) });
        }
        for x in &data {
            field.check(x)?;
        }
        Ok(Matrix { field: field.clone(), rows, cols, data })
    }

    pub fn from_rows(field: &FieldSpec, rows: Vec<Vec<FieldElement>>) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(LinalgError::ShapeMismatch { op: "from_rows", left: (r, c), right: (1, bad.len()) });
        }
        Matrix::new(field, r, c, rows.into_iter().flatten().collect())
    }

    /// Build a matrix from integer rows.
    ///
    /// # Panics
    /// If the rows are ragged.
    pub fn from_ints<R: AsRef<[i64]>>(field: &FieldSpec, rows: &[R]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.as_ref().len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.as_ref().len(), c, "ragged integer matrix");
            data.extend(row.as_ref().iter().map(|&x| field.from_i64(x)));
        }
        Matrix { field: field.clone(), rows: r, cols: c, data }
    }

    pub fn zeros(field: &FieldSpec, rows: usize, cols: usize) -> Self {
        Matrix { field: field.clone(), rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: &FieldSpec, n: usize) -> Self {
        Self::scalar(field, n, &field.one())
    }

    pub fn scalar(field: &FieldSpec, n: usize, lambda: &FieldElement) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = lambda.clone();
        }
        m
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &FieldElement {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, x: FieldElement) {
        debug_assert!(self.field.contains(&x));
        self.data[r * self.cols + c] = x;
    }

    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> impl Iterator<Item = &[FieldElement]> {
        (0..self.rows).map(move |r| self.row(r))
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.data
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.row_vectors().map(|row| row.iter().map(|x| self.field.format(x)).collect()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| self.field.is_zero(x))
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| {
                (0..self.cols).all(|c| {
                    let x = self.get(r, c);
                    if r == c {
                        self.field.is_one(x)
                    } else {
                        self.field.is_zero(x)
                    }
                })
            })
    }

    fn same_field(&self, other: &Matrix) -> Result<(), LinalgError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(LinalgError::FieldMismatch(self.field.to_string(), other.field.to_string()))
        }
    }

    pub fn try_mul(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        self.same_field(other)?;
        if self.cols != other.rows {
            return Err(LinalgError::ShapeMismatch { op: "mul", left: self.shape(), right: other.shape() });
        }
        let k = &self.field;
        let mut data = Vec::with_capacity(self.rows * other.cols);
        for r in 0..self.rows {
            let row = self.row(r);
            for c in 0..other.cols {
                let mut acc = k.zero();
                for (i, a) in row.iter().enumerate() {
                    if k.is_zero(a) {
                        continue;
                    }
                    let b = other.get(i, c);
                    if !k.is_zero(b) {
                        acc = k.add(&acc, &k.mul(a, b));
                    }
                }
                data.push(acc);
            }
        }
        Ok(Matrix { field: k.clone(), rows: self.rows, cols: other.cols, data })
    }

    fn zip_with(
        &self,
        other: &Matrix,
        op: &'static str,
        f: impl Fn(&FieldElement, &FieldElement) -> FieldElement,
    ) -> Result<Matrix, LinalgError> {
        self.same_field(other)?;
        if self.shape() != other.shape() {
            return Err(LinalgError::ShapeMismatch { op, left: self.shape(), right: other.shape() });
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect();
        Ok(Matrix { field: self.field.clone(), rows: self.rows, cols: self.cols, data })
    }

    pub fn try_add(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        self.zip_with(other, "add", |a, b| self.field.add(a, b))
    }

    pub fn try_sub(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        self.zip_with(other, "sub", |a, b| self.field.sub(a, b))
    }

    pub fn scale(&self, lambda: &FieldElement) -> Matrix {
        let data = self.data.iter().map(|x| self.field.mul(x, lambda)).collect();
        Matrix { field: self.field.clone(), rows: self.rows, cols: self.cols, data }
    }

    pub fn transpose(&self) -> Matrix {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.get(r, c).clone());
            }
        }
        Matrix { field: self.field.clone(), rows: self.cols, cols: self.rows, data }
    }

    /// `self - 1` for a square matrix.
    pub fn minus_identity(&self) -> Matrix {
        let mut m = self.clone();
        let one = self.field.one();
        for i in 0..self.rows.min(self.cols) {
            let x = self.field.sub(m.get(i, i), &one);
            m.set(i, i, x);
        }
        m
    }

    /// The row vector `v·self`.
    pub fn apply(&self, v: &[FieldElement]) -> Vec<FieldElement> {
        assert_eq!(v.len(), self.rows, "vector length does not match matrix rows");
        let k = &self.field;
        let mut out = vec![k.zero(); self.cols];
        for (i, a) in v.iter().enumerate() {
            if k.is_zero(a) {
                continue;
            }
            for (c, slot) in out.iter_mut().enumerate() {
                let b = self.get(i, c);
                if !k.is_zero(b) {
                    *slot = k.add(slot, &k.mul(a, b));
                }
            }
        }
        out
    }

    pub fn inverse(&self) -> Result<Matrix, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::ShapeMismatch { op: "inverse", left: self.shape(), right: self.shape() });
        }
        let n = self.rows;
        let augmented = self.hstack(&Matrix::identity(&self.field, n))?;
        let reduced = rref(&augmented);
        if reduced.rank < n || reduced.pivots[n - 1] != n - 1 {
            return Err(LinalgError::Singular);
        }
        reduced.matrix.extract(0, n, n, n)
    }

    pub fn pow(&self, exp: i64) -> Result<Matrix, LinalgError> {
        let mut base = if exp < 0 { self.inverse()? } else { self.clone() };
        let mut acc = Matrix::identity(&self.field, self.rows);
        let mut e = exp.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.try_mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.try_mul(&base)?;
            }
        }
        Ok(acc)
    }

    pub fn rank(&self) -> usize {
        rref(self).rank
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// Copy `block` into `self` with its top-left corner at the 1-based
    /// position `(row, col)`.
    pub fn insert_block(&mut self, block: &Matrix, row: usize, col: usize) -> Result<(), LinalgError> {
        self.same_field(block)?;
        if row == 0 || col == 0 || row - 1 + block.rows > self.rows || col - 1 + block.cols > self.cols {
            return Err(LinalgError::BlockOutOfRange { at: (row, col), size: block.shape(), shape: self.shape() });
        }
        for r in 0..block.rows {
            for c in 0..block.cols {
                self.data[(row - 1 + r) * self.cols + col - 1 + c] = block.get(r, c).clone();
            }
        }
        Ok(())
    }

    /// The `height × width` block whose top-left corner sits at the 1-based
    /// position `(row, col)`.
    pub fn extract_block(&self, row: usize, col: usize, height: usize, width: usize) -> Result<Matrix, LinalgError> {
        if row == 0 || col == 0 {
            return Err(LinalgError::BlockOutOfRange { at: (row, col), size: (height, width), shape: self.shape() });
        }
        self.extract(row - 1, col - 1, height, width)
    }

    fn extract(&self, r0: usize, c0: usize, height: usize, width: usize) -> Result<Matrix, LinalgError> {
        if r0 + height > self.rows || c0 + width > self.cols {
            return Err(LinalgError::BlockOutOfRange {
                at: (r0 + 1, c0 + 1),
                size: (height, width),
                shape: self.shape(),
            });
        }
        let mut data = Vec::with_capacity(height * width);
        for r in r0..r0 + height {
            data.extend_from_slice(&self.data[r * self.cols + c0..r * self.cols + c0 + width]);
        }
        Ok(Matrix { field: self.field.clone(), rows: height, cols: width, data })
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        self.same_field(other)?;
        let mut m = Matrix::zeros(&self.field, self.rows + other.rows, self.cols + other.cols);
        m.insert_block(self, 1, 1)?;
        m.insert_block(other, self.rows + 1, self.cols + 1)?;
        Ok(m)
    }

    pub fn hstack(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        self.same_field(other)?;
        if self.rows != other.rows {
            return Err(LinalgError::ShapeMismatch { op: "hstack", left: self.shape(), right: other.shape() });
        }
        let mut data = Vec::with_capacity(self.data.len() + other.data.len());
        for r in 0..self.rows {
            data.extend_from_slice(self.row(r));
            data.extend_from_slice(other.row(r));
        }
        Ok(Matrix { field: self.field.clone(), rows: self.rows, cols: self.cols + other.cols, data })
    }

    pub fn vstack(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        self.same_field(other)?;
        if self.cols != other.cols {
            return Err(LinalgError::ShapeMismatch { op: "vstack", left: self.shape(), right: other.shape() });
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Matrix { field: self.field.clone(), rows: self.rows + other.rows, cols: self.cols, data })
    }

    /// Map every entry through `f` into another field.
    pub fn map_entries(
        &self,
        field: &FieldSpec,
        f: impl Fn(&FieldElement) -> Result<FieldElement, FieldError>,
    ) -> Result<Matrix, LinalgError> {
        let data = self.data.iter().map(f).collect::<Result<Vec<_>, _>>()?;
        Matrix::new(field, self.rows, self.cols, data)
    }

    /// Append an injective encoding of the matrix to `buf`.
    pub fn write_key(&self, buf: &mut Vec<u8>) {
        buf.extend_from_slice(&(self.rows as u32).to_le_bytes());
        buf.extend_from_slice(&(self.cols as u32).to_le_bytes());
        for x in &self.data {
            write_key(x, buf);
        }
    }

    pub fn canonical_key(&self) -> Vec<u8> {
        let mut buf = Vec::with_capacity(8 + self.data.len() * 2);
        self.write_key(&mut buf);
        buf
    }
}

impl Mul for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        self.try_mul(rhs).expect("matrix product")
    }
}

impl Add for &Matrix {
    type Output = Matrix;

    fn add(self, rhs: &Matrix) -> Matrix {
        self.try_add(rhs).expect("matrix sum")
    }
}

impl Sub for &Matrix {
    type Output = Matrix;

    fn sub(self, rhs: &Matrix) -> Matrix {
        self.try_sub(rhs).expect("matrix difference")
    }
}

/// Reduced row-echelon form of a matrix.
#[derive(Debug, Clone)]
pub struct Rref {
    pub matrix: Matrix,
    pub pivots: Vec<usize>,
    pub rank: usize,
}

pub fn rref(a: &Matrix) -> Rref {
    let k = a.field.clone();
    let mut m = a.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols {
        if r == m.rows {
            break;
        }
        let Some(p) = (r..m.rows).find(|&i| !k.is_zero(m.get(i, c))) else {
            continue;
        };
        if p != r {
            for j in 0..m.cols {
                m.data.swap(p * m.cols + j, r * m.cols + j);
            }
        }
        let inv = k.inv(m.get(r, c)).expect("pivot is nonzero");
        for j in c..m.cols {
            let x = k.mul(m.get(r, j), &inv);
            m.data[r * m.cols + j] = x;
        }
        for i in 0..m.rows {
            if i == r {
                continue;
            }
            let f = m.get(i, c).clone();
            if k.is_zero(&f) {
                continue;
            }
            for j in c..m.cols {
                let t = m.get(r, j);
                if !k.is_zero(t) {
                    let x = k.sub(m.get(i, j), &k.mul(&f, t));
                    m.data[i * m.cols + j] = x;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let rank = pivots.len();
    Rref { matrix: m, pivots, rank }
}

/// A subspace of `k^ambient`, held by its reduced row-echelon basis.
#[derive(Clone, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    basis: Matrix,
    pivots: Vec<usize>,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in {}) ", self.dim(), self.ambient)?;
        f.debug_list().entries(self.basis.to_strings()).finish()
    }
}

impl Subspace {
    pub fn zero(field: &FieldSpec, ambient: usize) -> Self {
        Subspace { ambient, basis: Matrix::zeros(field, 0, ambient), pivots: Vec::new() }
    }

    pub fn full(field: &FieldSpec, ambient: usize) -> Self {
        Subspace { ambient, basis: Matrix::identity(field, ambient), pivots: (0..ambient).collect() }
    }

    /// The span of the rows of `m`.
    pub fn span(m: &Matrix) -> Self {
        let reduced = rref(m);
        let basis = reduced.matrix.extract(0, 0, reduced.rank, m.cols).expect("rank does not exceed row count");
        Subspace { ambient: m.cols, basis, pivots: reduced.pivots }
    }

    pub fn span_of_vectors(
        field: &FieldSpec,
        ambient: usize,
        vectors: &[Vec<FieldElement>],
    ) -> Result<Self, LinalgError> {
        if vectors.is_empty() {
            return Ok(Self::zero(field, ambient));
        }
        let m = Matrix::from_rows(field, vectors.to_vec())?;
        if m.cols != ambient {
            return Err(LinalgError::AmbientMismatch(ambient, m.cols));
        }
        Ok(Self::span(&m))
    }

    pub fn field(&self) -> &FieldSpec {
        &self.basis.field
    }

    pub fn dim(&self) -> usize {
        self.basis.rows
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    fn check_ambient(&self, other: &Subspace) -> Result<(), LinalgError> {
        if self.ambient != other.ambient {
            return Err(LinalgError::AmbientMismatch(self.ambient, other.ambient));
        }
        if self.field() != other.field() {
            return Err(LinalgError::FieldMismatch(self.field().to_string(), other.field().to_string()));
        }
        Ok(())
    }

    /// Coordinates of `v` in the echelon basis, or `None` if `v` is not in the
    /// subspace. Because the basis is reduced, the candidate coordinates are
    /// the entries of `v` at the pivot columns.
    pub fn coordinates(&self, v: &[FieldElement]) -> Option<Vec<FieldElement>> {
        assert_eq!(v.len(), self.ambient, "vector length does not match ambient dimension");
        let coords: Vec<FieldElement> = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let back = if coords.is_empty() { vec![self.field().zero(); self.ambient] } else { self.basis.apply(&coords) };
        (back == v).then_some(coords)
    }

    pub fn contains_vector(&self, v: &[FieldElement]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn contains(&self, other: &Subspace) -> Result<bool, LinalgError> {
        self.check_ambient(other)?;
        Ok(other.basis.row_vectors().all(|v| self.contains_vector(v)))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check_ambient(other)?;
        Ok(Subspace::span(&self.basis.vstack(&other.basis)?))
    }

    /// Intersection by the Zassenhaus method.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check_ambient(other)?;
        let n = self.ambient;
        let k = self.field();
        let top = self.basis.hstack(&self.basis)?;
        let bottom = other.basis.hstack(&Matrix::zeros(k, other.dim(), n))?;
        let reduced = rref(&top.vstack(&bottom)?);
        let first = reduced.pivots.iter().position(|&p| p >= n).unwrap_or(reduced.rank);
        let block = reduced.matrix.extract(first, n, reduced.rank - first, n)?;
        Ok(Subspace::span(&block))
    }

    /// The subspace `{v·m : v ∈ self}`.
    pub fn image_under(&self, m: &Matrix) -> Result<Subspace, LinalgError> {
        Ok(Subspace::span(&self.basis.try_mul(m)?))
    }

    pub fn is_invariant_under(&self, m: &Matrix) -> Result<bool, LinalgError> {
        let img = self.image_under(m)?;
        self.contains(&img)
    }

    /// Matrix of the action of `m` on this (invariant) subspace in the echelon
    /// basis; `None` if the subspace is not invariant.
    pub fn restrict(&self, m: &Matrix) -> Option<Matrix> {
        let mut rows = Vec::with_capacity(self.dim());
        for b in self.basis.row_vectors() {
            rows.push(self.coordinates(&m.apply(b))?);
        }
        if rows.is_empty() {
            return Some(Matrix::zeros(self.field(), 0, 0));
        }
        Matrix::from_rows(self.field(), rows).ok()
    }
}

/// The row space `{v·a}` of `a`.
pub fn image(a: &Matrix) -> Subspace {
    Subspace::span(a)
}

/// The left kernel `{v : v·a = 0}` of `a`.
pub fn kernel(a: &Matrix) -> Subspace {
    let k = a.field();
    let m = a.rows;
    let augmented = a.hstack(&Matrix::identity(k, m)).expect("row counts agree");
    let reduced = rref(&augmented);
    let first = reduced.pivots.iter().position(|&p| p >= a.cols).unwrap_or(reduced.rank);
    // [a | 1] has full row rank; rows whose pivot lies in the identity part
    // have a vanishing a-part.
    let block = reduced.matrix.extract(first, a.cols, m - first, m).expect("block in range");
    Subspace::span(&block)
}

pub fn intersect(u: &Subspace, w: &Subspace) -> Result<Subspace, LinalgError> {
    u.intersect(w)
}

/// Incrementally built echelon basis used for rank tests while extending.
pub(crate) struct EchelonBuilder {
    field: FieldSpec,
    rows: Vec<(usize, Vec<FieldElement>)>,
}

impl EchelonBuilder {
    pub(crate) fn new(field: &FieldSpec) -> Self {
        EchelonBuilder { field: field.clone(), rows: Vec::new() }
    }

    fn reduce(&self, v: &[FieldElement]) -> Vec<FieldElement> {
        let k = &self.field;
        let mut w = v.to_vec();
        for (p, row) in &self.rows {
            if k.is_zero(&w[*p]) {
                continue;
            }
            let f = w[*p].clone();
            for (x, y) in w.iter_mut().zip(row) {
                if !k.is_zero(y) {
                    *x = k.sub(x, &k.mul(&f, y));
                }
            }
        }
        w
    }

    /// Add `v` if it is independent of the vectors so far; returns whether it
    /// was added.
    pub(crate) fn insert(&mut self, v: &[FieldElement]) -> bool {
        let w = self.reduce(v);
        let Some(p) = w.iter().position(|x| !self.field.is_zero(x)) else {
            return false;
        };
        let inv = self.field.inv(&w[p]).expect("nonzero");
        let w: Vec<FieldElement> = w.iter().map(|x| self.field.mul(x, &inv)).collect();
        self.rows.push((p, w));
        true
    }

    pub(crate) fn len(&self) -> usize {
        self.rows.len()
    }
}

fn unit_vector(field: &FieldSpec, n: usize, i: usize) -> Vec<FieldElement> {
    let mut v = vec![field.zero(); n];
    v[i] = field.one();
    v
}

/// An invertible `ambient × ambient` matrix adapted to the flag
/// `inner ⊆ outer ⊆ k^ambient`.
///
/// The first rows are the echelon basis of `inner`; then come those echelon
/// basis rows of `outer` that enlarge the span, then those unit vectors
/// `e_1, e_2, …` that do. Rows already chosen are never rescaled.
pub fn extend_basis(inner: &Subspace, outer: &Subspace, ambient: usize) -> Result<Matrix, LinalgError> {
    if inner.ambient != ambient || outer.ambient != ambient {
        return Err(LinalgError::AmbientMismatch(inner.ambient.max(outer.ambient), ambient));
    }
    if !outer.contains(inner)? {
        return Err(LinalgError::NotNested);
    }
    let k = inner.field().clone();
    let mut builder = EchelonBuilder::new(&k);
    let mut rows: Vec<Vec<FieldElement>> = Vec::with_capacity(ambient);
    let candidates = inner
        .basis
        .row_vectors()
        .chain(outer.basis.row_vectors())
        .map(<[FieldElement]>::to_vec)
        .chain((0..ambient).map(|i| unit_vector(&k, ambient, i)));
    for v in candidates {
        if builder.len() == ambient {
            break;
        }
        if builder.insert(&v) {
            rows.push(v);
        }
    }
    if rows.is_empty() {
        return Ok(Matrix::zeros(&k, 0, 0));
    }
    Matrix::from_rows(&k, rows)
}

/// The space of `d × d` matrices `T` with `T·b_i = a_i·T` for every `i`,
/// as a subspace of `k^(d²)` (row-major flattening).
pub fn intertwiner_space(a: &[Matrix], b: &[Matrix]) -> Result<Subspace, LinalgError> {
    if a.len() != b.len() {
        return Err(LinalgError::ShapeMismatch { op: "intertwiner_space", left: (a.len(), 0), right: (b.len(), 0) });
    }
    let Some(first) = a.first().or(b.first()) else {
        return Err(LinalgError::ShapeMismatch { op: "intertwiner_space", left: (0, 0), right: (0, 0) });
    };
    let d = first.rows;
    let k = first.field.clone();
    for m in a.iter().chain(b) {
        if m.shape() != (d, d) {
            return Err(LinalgError::ShapeMismatch { op: "intertwiner_space", left: (d, d), right: m.shape() });
        }
        first.same_field(m)?;
    }
    // Unknown T[p][q] is row p*d+q; equation (i, x, y) is column
    // i*d*d + x*d + y of (a_i T - T b_i)[x][y].
    let unknowns = d * d;
    let mut sys = Matrix::zeros(&k, unknowns, unknowns * a.len());
    for (i, (ai, bi)) in a.iter().zip(b).enumerate() {
        for x in 0..d {
            for y in 0..d {
                let col = i * unknowns + x * d + y;
                for p in 0..d {
                    // a_i[x][p] * T[p][y]
                    let row = p * d + y;
                    let v = k.add(sys.get(row, col), ai.get(x, p));
                    sys.set(row, col, v);
                }
                for q in 0..d {
                    // - T[x][q] * b_i[q][y]
                    let row = x * d + q;
                    let v = k.sub(sys.get(row, col), bi.get(q, y));
                    sys.set(row, col, v);
                }
            }
        }
    }
    Ok(kernel(&sys))
}

/// Reshape a flattened `d²` vector into a `d × d` matrix.
pub fn unflatten(field: &FieldSpec, v: &[FieldElement], d: usize) -> Result<Matrix, LinalgError> {
    Matrix::new(field, d, d, v.to_vec())
}
