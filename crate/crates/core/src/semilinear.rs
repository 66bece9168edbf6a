//! Exact linear and σ-semilinear algebra over a [`FiniteField`].
//!
//! Operators act on column vectors. A σ^e-semilinear operator with matrix `A`
//! sends `x` to `A · σ^e(x)`, where `σ^e` is applied to each coordinate.
//! Subspaces are stored by their reduced row-echelon basis, so two subspaces
//! are equal exactly when their stored bases are equal.
//!
//! Two names are used for the two kinds of Frobenius superscript:
//! [`twist`] raises every entry to `p^e`, while [`sigma_power_product`]
//! is the product `H · H^σ · ... · H^{σ^{m-1}}`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Index, IndexMut};

use rand::Rng;
use serde_json::Value;
use thiserror::Error;

use crate::field::{Elem, FieldError, FiniteField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("bilinear form is degenerate")]
    DegenerateForm,
    #[error("matrix is singular")]
    Singular,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Dense row-major matrix over a finite field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
    field: FiniteField,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over {}", self.rows, self.cols, self.field)?;
        for r in 0..self.rows {
            let row: Vec<Value> = self.row(r).iter().map(|&x| self.field.to_json(x)).collect();
            writeln!(f, "  {}", Value::from(row))?;
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Elem;
    fn index(&self, (r, c): (usize, usize)) -> &Elem {
        assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Elem {
        assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl Matrix {
    pub fn zeros(field: &FiniteField, rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Elem::ZERO; rows * cols],
            field: field.clone(),
        }
    }

    pub fn identity(field: &FiniteField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m[(i, i)] = Elem::ONE;
        }
        m
    }

    pub fn from_fn(
        field: &FiniteField,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Elem,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix {
            rows,
            cols,
            data,
            field: field.clone(),
        }
    }

    /// Entrywise image under a field embedding given as a table, see [`FiniteField::embedding`].
    pub fn embed(&self, big: &FiniteField, table: &[Elem]) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| table[x.0 as usize]).collect(),
            field: big.clone(),
        }
    }

    /// Builds a matrix from rows; every row must have `cols` entries.
    pub fn from_rows(field: &FiniteField, cols: usize, rows: &[Vec<Elem>]) -> Result<Self, MatrixError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(MatrixError::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
            field: field.clone(),
        })
    }

    /// Convenience constructor from small integers (reduced mod p).
    pub fn from_ints(field: &FiniteField, rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows: Vec<Vec<Elem>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| field.from_int(x)).collect())
            .collect();
        Self::from_rows(field, cols, &rows).expect("rows of equal length")
    }

    pub fn random<R: Rng + ?Sized>(field: &FiniteField, rows: usize, cols: usize, rng: &mut R) -> Self {
        let q = field.order();
        Self::from_fn(field, rows, cols, |_, _| Elem(rng.gen_range(0..q)))
    }

    /// A uniformly random invertible matrix (rejection sampling).
    pub fn random_invertible<R: Rng + ?Sized>(field: &FiniteField, n: usize, rng: &mut R) -> Self {
        loop {
            let m = Self::random(field, n, n, rng);
            if m.rank() == n {
                return m;
            }
        }
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, r: usize) -> &[Elem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Elem> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<Elem>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(&self.field, self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn neg(&self) -> Matrix {
        self.map(|x| self.field.neg(x))
    }

    pub fn map(&self, f: impl Fn(Elem) -> Elem) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
            field: self.field.clone(),
        }
    }

    fn check_field(&self, other: &Matrix) -> Result<(), MatrixError> {
        Ok(self.field.check_same(&other.field)?)
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, MatrixError> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(MatrixError::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other[(l, j)];
                    if !b.is_zero() {
                        let cur = out[(i, j)];
                        out[(i, j)] = f.add(cur, f.mul(a, b));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix, MatrixError> {
        self.check_field(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(MatrixError::DimensionMismatch("cannot add matrices of different shapes".into()));
        }
        let f = &self.field;
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect(),
            field: f.clone(),
        })
    }

    /// `A · σ^e(v)` for a column vector `v`.
    pub fn apply(&self, v: &[Elem], e: i64) -> Result<Vec<Elem>, MatrixError> {
        if v.len() != self.cols {
            return Err(MatrixError::DimensionMismatch(format!(
                "vector of length {} for a matrix with {} columns",
                v.len(),
                self.cols
            )));
        }
        let f = &self.field;
        let tv: Vec<Elem> = v.iter().map(|&x| f.frobenius(x, e)).collect();
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(&tv)
                    .fold(Elem::ZERO, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
            })
            .collect())
    }

    /// Reduced row-echelon form and its pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        (m, pivots)
    }

    fn rref_in_place(&mut self) -> Vec<usize> {
        let f = self.field.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(pr) = (r..rows).find(|&i| !self.data[i * cols + c].is_zero()) else {
                continue;
            };
            if pr != r {
                for j in 0..cols {
                    self.data.swap(pr * cols + j, r * cols + j);
                }
            }
            let inv = f.inv(self.data[r * cols + c]).expect("nonzero pivot");
            for j in c..cols {
                let x = self.data[r * cols + j];
                self.data[r * cols + j] = f.mul(x, inv);
            }
            for i in 0..rows {
                if i == r {
                    continue;
                }
                let factor = self.data[i * cols + c];
                if factor.is_zero() {
                    continue;
                }
                for j in c..cols {
                    let sub = f.mul(factor, self.data[r * cols + j]);
                    let x = self.data[i * cols + j];
                    self.data[i * cols + j] = f.sub(x, sub);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref_in_place().len()
    }

    /// Right null space `{x : A x = 0}`.
    pub fn kernel(&self) -> Subspace {
        let (r, pivots) = self.rref();
        let f = &self.field;
        let mut vecs = Vec::new();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![Elem::ZERO; self.cols];
            v[free] = Elem::ONE;
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = f.neg(r[(i, free)]);
            }
            vecs.push(v);
        }
        Subspace::span(f, self.cols, &vecs).expect("kernel vectors have ambient length")
    }

    /// Column space as a subspace of `F^rows`.
    pub fn column_space(&self) -> Subspace {
        Subspace::from_matrix(&self.transpose())
    }

    pub fn inverse(&self) -> Result<Matrix, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let aug = self.hstack(&Matrix::identity(&self.field, n))?;
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(MatrixError::Singular);
        }
        Ok(Matrix::from_fn(&self.field, n, n, |i, j| r[(i, n + j)]))
    }

    pub fn hstack(&self, other: &Matrix) -> Result<Matrix, MatrixError> {
        self.check_field(other)?;
        if self.rows != other.rows {
            return Err(MatrixError::DimensionMismatch("hstack needs equal row counts".into()));
        }
        Ok(Matrix::from_fn(&self.field, self.rows, self.cols + other.cols, |r, c| {
            if c < self.cols {
                self[(r, c)]
            } else {
                other[(r, c - self.cols)]
            }
        }))
    }

    pub fn vstack(&self, other: &Matrix) -> Result<Matrix, MatrixError> {
        self.check_field(other)?;
        if self.cols != other.cols {
            return Err(MatrixError::DimensionMismatch("vstack needs equal column counts".into()));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
            field: self.field.clone(),
        })
    }

    /// Block-diagonal matrix with the given square or rectangular blocks.
    pub fn block_diagonal(field: &FiniteField, blocks: &[&Matrix]) -> Result<Matrix, MatrixError> {
        let rows: usize = blocks.iter().map(|b| b.rows).sum();
        let cols: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Matrix::zeros(field, rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            field.check_same(&b.field)?;
            for r in 0..b.rows {
                for c in 0..b.cols {
                    out[(r0 + r, c0 + c)] = b[(r, c)];
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        Ok(out)
    }

    /// Sub-block `rows r0..r0+nr`, `cols c0..c0+nc`.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Matrix {
        Matrix::from_fn(&self.field, nr, nc, |r, c| self[(r0 + r, c0 + c)])
    }

    /// Row-major nested arrays in the element wire format.
    pub fn to_json(&self) -> Value {
        Value::from(
            (0..self.rows)
                .map(|r| Value::from(self.row(r).iter().map(|&x| self.field.to_json(x)).collect::<Vec<_>>()))
                .collect::<Vec<_>>(),
        )
    }

    /// Parses row-major nested arrays. `shape`, if given, is checked.
    pub fn from_json(field: &FiniteField, v: &Value, shape: Option<(usize, usize)>) -> Result<Matrix, MatrixError> {
        let rows = v
            .as_array()
            .ok_or_else(|| MatrixError::DimensionMismatch("matrix must be an array of rows".into()))?;
        let mut parsed = Vec::with_capacity(rows.len());
        for row in rows {
            let row = row
                .as_array()
                .ok_or_else(|| MatrixError::DimensionMismatch("matrix row must be an array".into()))?;
            parsed.push(row.iter().map(|x| field.from_json(x)).collect::<Result<Vec<_>, _>>()?);
        }
        let cols = parsed.first().map_or(shape.map_or(0, |s| s.1), |r| r.len());
        let m = Matrix::from_rows(field, cols, &parsed)?;
        if let Some((r, c)) = shape {
            if m.rows != r || m.cols != c {
                return Err(MatrixError::DimensionMismatch(format!(
                    "expected a {r}x{c} matrix, got {}x{}",
                    m.rows, m.cols
                )));
            }
        }
        Ok(m)
    }
}

/// Entrywise `σ^e`.
pub fn twist(m: &Matrix, e: i64) -> Matrix {
    let f = m.field.clone();
    m.map(|x| f.frobenius(x, e))
}

/// `H^(m) = H · H^σ · ... · H^{σ^{m-1}}`, the matrix of the m-th iterate of `x ↦ H σ(x)`.
pub fn sigma_power_product(h: &Matrix, m: usize) -> Result<Matrix, MatrixError> {
    if !h.is_square() {
        return Err(MatrixError::NotSquare { rows: h.rows, cols: h.cols });
    }
    let mut acc = Matrix::identity(&h.field, h.rows);
    for i in 0..m {
        acc = acc.mul(&twist(h, i as i64))?;
    }
    Ok(acc)
}

/// Canonical row space and rank.
pub fn echelonize(m: &Matrix) -> (Subspace, usize) {
    let s = Subspace::from_matrix(m);
    let r = s.dim();
    (s, r)
}

/// Relation between two subspaces of the same ambient space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubspaceRelation {
    Equal,
    /// The first argument is strictly contained in the second.
    Contained,
    /// The first argument strictly contains the second.
    Contains,
    Incomparable,
}

/// A subspace of `F^n`, stored by its reduced row-echelon basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: Matrix,
    pivots: Vec<usize>,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in {}, basis {})", self.dim(), self.ambient, self.basis.to_json())
    }
}

impl Subspace {
    pub fn zero(field: &FiniteField, ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Matrix::zeros(field, 0, ambient),
            pivots: Vec::new(),
        }
    }

    pub fn full(field: &FiniteField, ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Matrix::identity(field, ambient),
            pivots: (0..ambient).collect(),
        }
    }

    /// Row space of `m`.
    pub fn from_matrix(m: &Matrix) -> Self {
        let (r, pivots) = m.rref();
        let basis = r.block(0, 0, pivots.len(), m.cols);
        Subspace { ambient: m.cols, basis, pivots }
    }

    pub fn span(field: &FiniteField, ambient: usize, vectors: &[Vec<Elem>]) -> Result<Self, MatrixError> {
        Ok(Self::from_matrix(&Matrix::from_rows(field, ambient, vectors)?))
    }

    pub fn field(&self) -> &FiniteField {
        &self.basis.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    /// RREF basis, one vector per row.
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vec<Elem>> {
        self.basis.row_vecs()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn is_zero(&self) -> bool {
        self.pivots.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.pivots.len() == self.ambient
    }

    fn check(&self, other: &Subspace) -> Result<(), MatrixError> {
        self.field().check_same(other.field())?;
        if self.ambient != other.ambient {
            return Err(MatrixError::DimensionMismatch(format!(
                "subspaces of F^{} and F^{}",
                self.ambient, other.ambient
            )));
        }
        Ok(())
    }

    /// Reduces `v` against the basis; the result is zero iff `v` lies in the subspace.
    pub fn reduce(&self, v: &[Elem]) -> Vec<Elem> {
        let f = self.field();
        let mut out = v.to_vec();
        for (i, &p) in self.pivots.iter().enumerate() {
            let c = out[p];
            if c.is_zero() {
                continue;
            }
            for (j, &b) in self.basis.row(i).iter().enumerate() {
                if !b.is_zero() {
                    out[j] = f.sub(out[j], f.mul(c, b));
                }
            }
        }
        out
    }

    pub fn contains_vector(&self, v: &[Elem]) -> bool {
        v.len() == self.ambient && self.reduce(v).iter().all(|x| x.is_zero())
    }

    /// `self ⊆ other`.
    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.ambient == other.ambient
            && self.dim() <= other.dim()
            && (0..self.dim()).all(|i| other.contains_vector(self.basis.row(i)))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, MatrixError> {
        self.check(other)?;
        Ok(Subspace::from_matrix(&self.basis.vstack(&other.basis)?))
    }

    /// Standard annihilator `{x : x · s = 0 for all s}`.
    pub fn annihilator(&self) -> Subspace {
        self.basis.kernel()
    }

    pub fn intersection(&self, other: &Subspace) -> Result<Subspace, MatrixError> {
        self.check(other)?;
        let stacked = self.annihilator().basis.vstack(&other.annihilator().basis)?;
        Ok(stacked.kernel())
    }

    pub fn compare(&self, other: &Subspace) -> Result<SubspaceRelation, MatrixError> {
        self.check(other)?;
        let le = self.is_subspace_of(other);
        let ge = other.is_subspace_of(self);
        Ok(match (le, ge) {
            (true, true) => SubspaceRelation::Equal,
            (true, false) => SubspaceRelation::Contained,
            (false, true) => SubspaceRelation::Contains,
            (false, false) => SubspaceRelation::Incomparable,
        })
    }

    /// `σ^e` applied coordinatewise to every vector.
    pub fn twist(&self, e: i64) -> Subspace {
        Subspace::from_matrix(&twist(&self.basis, e))
    }

    /// A vector basis of a complement of `self` inside `upper` (`self ⊆ upper` assumed).
    pub fn complement_in(&self, upper: &Subspace) -> Vec<Vec<Elem>> {
        let mut acc = self.clone();
        let mut out = Vec::new();
        for v in upper.basis_vectors() {
            if !acc.contains_vector(&v) {
                acc = acc
                    .sum(&Subspace::span(self.field(), self.ambient, std::slice::from_ref(&v)).expect("length"))
                    .expect("same ambient");
                out.push(v);
            }
        }
        out
    }
}

impl PartialOrd for Subspace {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.compare(other).ok()? {
            SubspaceRelation::Equal => Some(Ordering::Equal),
            SubspaceRelation::Contained => Some(Ordering::Less),
            SubspaceRelation::Contains => Some(Ordering::Greater),
            SubspaceRelation::Incomparable => None,
        }
    }
}

pub fn subspace_compare(s: &Subspace, t: &Subspace) -> Result<SubspaceRelation, MatrixError> {
    s.compare(t)
}

/// Span of `{A · σ^e(v) : v ∈ S}`, the image of `S` under the σ^e-semilinear map with matrix `A`.
pub fn subspace_image(a: &Matrix, e: i64, s: &Subspace) -> Result<Subspace, MatrixError> {
    a.field.check_same(s.field())?;
    if a.cols != s.ambient {
        return Err(MatrixError::DimensionMismatch(format!(
            "operator with {} columns applied to a subspace of F^{}",
            a.cols, s.ambient
        )));
    }
    // rows of (A · σ^e(B^T))^T span the image
    let img = a.mul(&twist(&s.basis, e).transpose())?;
    Ok(Subspace::from_matrix(&img.transpose()))
}

/// `{x : A · σ^e(x) ∈ S}`.
pub fn subspace_preimage(a: &Matrix, e: i64, s: &Subspace) -> Result<Subspace, MatrixError> {
    a.field.check_same(s.field())?;
    if a.rows != s.ambient {
        return Err(MatrixError::DimensionMismatch(format!(
            "operator with {} rows and a subspace of F^{}",
            a.rows, s.ambient
        )));
    }
    // y = σ^e(x) ranges over ker(W A) where the rows of W span the annihilator of S
    let w = s.annihilator();
    let linear = w.basis.mul(a)?.kernel();
    Ok(linear.twist(-e))
}

/// `{x : b(x, s) = 0 for all s ∈ S}` with `b(x, y) = xᵀ G y`.
pub fn orthogonal_complement(s: &Subspace, gram: &Matrix) -> Result<Subspace, MatrixError> {
    gram.field.check_same(s.field())?;
    if !gram.is_square() {
        return Err(MatrixError::NotSquare { rows: gram.rows, cols: gram.cols });
    }
    if gram.rows != s.ambient {
        return Err(MatrixError::DimensionMismatch(format!(
            "form of size {} and a subspace of F^{}",
            gram.rows, s.ambient
        )));
    }
    if gram.rank() != gram.rows {
        return Err(MatrixError::DegenerateForm);
    }
    // xᵀ (G s) = 0 for each basis vector s: kernel of the rows (G s)ᵀ = sᵀ Gᵀ
    let constraints = s.basis.mul(&gram.transpose())?;
    Ok(constraints.kernel())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn example_matrix_a0() -> Matrix {
        let f = make_field(3, 1).unwrap();
        Matrix::from_ints(
            &f,
            &[&[0, 0, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, 1], &[0, 0, 0, 0]],
        )
    }

    #[test]
    fn ranks_of_basic_matrices() {
        let f = make_field(3, 1).unwrap();
        assert_eq!(echelonize(&Matrix::zeros(&f, 4, 4)).1, 0);
        assert_eq!(echelonize(&Matrix::identity(&f, 5)).1, 5);
        assert_eq!(echelonize(&example_matrix_a0()).1, 2);
    }

    #[test]
    fn twist_over_prime_field_is_identity() {
        let f = make_field(3, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = Matrix::random(&f, 3, 4, &mut rng);
        assert_eq!(twist(&m, 1), m);
    }

    #[test]
    fn twist_over_f9_cubes_entries() {
        let f = make_field(3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m = Matrix::random(&f, 3, 3, &mut rng);
        let t = twist(&m, 1);
        for r in 0..3 {
            for c in 0..3 {
                assert_eq!(t[(r, c)], f.pow(m[(r, c)], 3).unwrap());
            }
        }
        assert_eq!(twist(&t, -1), m);
    }

    #[test]
    fn sigma_power_product_basics() {
        let h = example_matrix_a0();
        let f = h.field().clone();
        assert_eq!(sigma_power_product(&h, 0).unwrap(), Matrix::identity(&f, 4));
        assert_eq!(sigma_power_product(&h, 1).unwrap(), h);
        assert!(sigma_power_product(&h, 2).unwrap().is_zero());
        let rect = Matrix::zeros(&f, 2, 3);
        assert!(matches!(sigma_power_product(&rect, 1), Err(MatrixError::NotSquare { .. })));
    }

    #[test]
    fn sigma_power_product_matches_iterated_application() {
        let f = make_field(5, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = Matrix::random(&f, 3, 3, &mut rng);
        let x: Vec<Elem> = (0..3).map(|_| Elem(rng.gen_range(0..25))).collect();
        let mut y = x.clone();
        for _ in 0..3 {
            y = h.apply(&y, 1).unwrap();
        }
        let direct = sigma_power_product(&h, 3).unwrap().apply(&x, 3).unwrap();
        assert_eq!(y, direct);
    }

    #[test]
    fn image_edge_cases() {
        let f = make_field(3, 2).unwrap();
        let zero = Subspace::zero(&f, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = Matrix::random(&f, 3, 3, &mut rng);
        assert!(subspace_image(&a, 1, &zero).unwrap().is_zero());
        let s = Subspace::from_matrix(&Matrix::random(&f, 2, 3, &mut rng));
        assert_eq!(subspace_image(&Matrix::identity(&f, 3), 0, &s).unwrap(), s);

        let nil = Matrix::from_ints(&f, &[&[0, 1, 0], &[0, 0, 0], &[0, 0, 0]]);
        let full = Subspace::full(&f, 3);
        let once = subspace_image(&nil, 1, &full).unwrap();
        assert_eq!(once.dim(), 1);
        assert!(subspace_image(&nil, 1, &once).unwrap().is_zero());
        assert!(matches!(
            subspace_image(&Matrix::identity(&f, 2), 0, &full),
            Err(MatrixError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn preimage_edge_cases() {
        let f = make_field(3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = Matrix::random(&f, 3, 3, &mut rng);
        let full = Subspace::full(&f, 3);
        assert_eq!(subspace_preimage(&a, 1, &full).unwrap(), full);
        let s = Subspace::from_matrix(&Matrix::random(&f, 1, 3, &mut rng));
        assert_eq!(subspace_preimage(&Matrix::zeros(&f, 3, 3), 1, &s).unwrap(), full);
        assert_eq!(subspace_preimage(&Matrix::identity(&f, 3), 0, &s).unwrap(), s);
    }

    #[test]
    fn preimage_membership_brute_force() {
        // every vector of F_9^2 is tested directly against the definition
        let f = make_field(3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..10 {
            let a = Matrix::random(&f, 2, 2, &mut rng);
            let s = Subspace::from_matrix(&Matrix::random(&f, 1, 2, &mut rng));
            for e in [-1i64, 1] {
                let pre = subspace_preimage(&a, e, &s).unwrap();
                for x0 in f.elements() {
                    for x1 in f.elements() {
                        let x = vec![x0, x1];
                        let inside = s.contains_vector(&a.apply(&x, e).unwrap());
                        assert_eq!(inside, pre.contains_vector(&x));
                    }
                }
            }
        }
    }

    #[test]
    fn orthogonal_complement_examples() {
        let f = make_field(3, 1).unwrap();
        let b = Matrix::from_ints(&f, &[&[0, 1], &[-1, 0]]);
        let zero = Subspace::zero(&f, 2);
        let full = Subspace::full(&f, 2);
        assert_eq!(orthogonal_complement(&zero, &b).unwrap(), full);
        assert!(orthogonal_complement(&full, &b).unwrap().is_zero());
        let line_f = Subspace::span(&f, 2, &[vec![Elem(0), Elem(1)]]).unwrap();
        assert_eq!(orthogonal_complement(&line_f, &b).unwrap(), line_f);
        let degenerate = Matrix::from_ints(&f, &[&[0, 1], &[0, 0]]);
        assert_eq!(orthogonal_complement(&line_f, &degenerate).unwrap_err(), MatrixError::DegenerateForm);
    }

    #[test]
    fn compare_sum_intersection() {
        let f = make_field(5, 1).unwrap();
        let l1 = Subspace::span(&f, 2, &[vec![Elem(1), Elem(0)]]).unwrap();
        let l2 = Subspace::span(&f, 2, &[vec![Elem(1), Elem(1)]]).unwrap();
        let zero = Subspace::zero(&f, 2);
        assert_eq!(l1.compare(&l1).unwrap(), SubspaceRelation::Equal);
        assert_eq!(zero.compare(&l1).unwrap(), SubspaceRelation::Contained);
        assert_eq!(l1.compare(&zero).unwrap(), SubspaceRelation::Contains);
        assert_eq!(l1.compare(&l2).unwrap(), SubspaceRelation::Incomparable);
        assert!(l1.sum(&l2).unwrap().is_full());
        assert!(l1.intersection(&l2).unwrap().is_zero());
        let other = Subspace::zero(&f, 3);
        assert!(matches!(l1.compare(&other), Err(MatrixError::DimensionMismatch(_))));
    }

    #[test]
    fn inverse_round_trip() {
        let f = make_field(3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = Matrix::random_invertible(&f, 4, &mut rng);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), Matrix::identity(&f, 4));
        assert_eq!(Matrix::zeros(&f, 2, 2).inverse().unwrap_err(), MatrixError::Singular);
    }

    #[test]
    fn json_round_trip() {
        let f = make_field(3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let m = Matrix::random(&f, 2, 3, &mut rng);
        let back = Matrix::from_json(&f, &m.to_json(), Some((2, 3))).unwrap();
        assert_eq!(back, m);
        assert!(Matrix::from_json(&f, &m.to_json(), Some((3, 2))).is_err());
    }
}
