//! Dense matrices over a finite field.
//!
//! Storage is row-major. Linear maps act on column vectors, so column `j`
//! holds the image of the `j`-th basis vector.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Elem, Embedding, Field};

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix {}x{} ", self.rows, self.cols)?;
        f.debug_list().entries(self.to_rows()).finish()
    }
}

impl Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl Matrix {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Matrix {
        Matrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: &Field, n: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn scalar(field: &Field, n: usize, c: Elem) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = c;
        }
        m
    }

    pub fn from_rows(field: &Field, rows: &[Vec<Elem>]) -> Result<Matrix> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        Matrix::from_rows_sized(field, r, c, rows)
    }

    /// Like [`Matrix::from_rows`] but with explicit shape, so `0 x n` works.
    pub fn from_rows_sized(
        field: &Field,
        r: usize,
        c: usize,
        rows: &[Vec<Elem>],
    ) -> Result<Matrix> {
        if rows.len() != r || rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch(format!(
                "expected a {r}x{c} matrix"
            )));
        }
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            for &e in row {
                if !field.contains(e) {
                    return Err(Error::FieldMismatch(format!(
                        "entry {e} is not an element of {field:?}"
                    )));
                }
                data.push(e);
            }
        }
        Ok(Matrix {
            field: field.clone(),
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn from_fn(
        field: &Field,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Elem,
    ) -> Matrix {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix {
            field: field.clone(),
            rows,
            cols,
            data,
        }
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(field: &Field, rows: usize, columns: &[Vec<Elem>]) -> Matrix {
        Matrix::from_fn(field, rows, columns.len(), |i, j| columns[j][i])
    }

    pub fn field(&self) -> &Field {
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

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn to_rows(&self) -> Vec<Vec<Elem>> {
        (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec())
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<Elem> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Elem>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&e| e == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..self.cols).all(|j| self.get(i, j) == (i == j) as Elem))
    }

    fn check_field(&self, other: &Matrix) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(format!(
                "{:?} vs {:?}",
                self.field, other.field
            )));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b != 0 {
                        let idx = i * out.cols + j;
                        out.data[idx] = f.add(out.data[idx], f.mul(a, b));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[Elem]) -> Result<Vec<Elem>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for a {}x{} matrix",
                v.len(),
                self.rows,
                self.cols
            )));
        }
        let f = &self.field;
        Ok((0..self.rows)
            .map(|i| (0..self.cols).fold(0, |acc, k| f.add(acc, f.mul(self.get(i, k), v[k]))))
            .collect())
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, |f, a, b| f.add(a, b))
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, |f, a, b| f.sub(a, b))
    }

    fn zip_with(&self, other: &Matrix, op: impl Fn(&Field, Elem, Elem) -> Elem) -> Result<Matrix> {
        self.check_field(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        Ok(Matrix {
            field: f.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| op(f, a, b))
                .collect(),
        })
    }

    pub fn scale(&self, c: Elem) -> Matrix {
        self.map(|f, a| f.mul(c, a))
    }

    pub fn neg(&self) -> Matrix {
        self.map(|f, a| f.neg(a))
    }

    pub fn map(&self, op: impl Fn(&Field, Elem) -> Elem) -> Matrix {
        Matrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| op(&self.field, a)).collect(),
        }
    }

    /// Entrywise `σ^e`.
    pub fn frob(&self, e: i64) -> Matrix {
        if e == 0 {
            return self.clone();
        }
        self.map(|f, a| f.frob(a, e))
    }

    /// Same entries read in a larger field.
    pub fn embed(&self, big: &Field) -> Result<Matrix> {
        let emb: Embedding = big.embedding_from(&self.field)?;
        Ok(Matrix {
            field: big.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| emb.apply(a)).collect(),
        })
    }

    /// Reinterpret the entries in another field with identical arithmetic
    /// (same `p` and degree), e.g. to change the Frobenius convention.
    pub fn retag(&self, field: &Field) -> Result<Matrix> {
        if field.p() != self.field.p() || field.degree() != self.field.degree() {
            return Err(Error::FieldMismatch(format!(
                "{:?} and {field:?} have different arithmetic",
                self.field
            )));
        }
        Ok(Matrix {
            field: field.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.clone(),
        })
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(&self.field, self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn pow(&self, mut e: u64) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(
                "power of a non-square matrix".into(),
            ));
        }
        let mut base = self.clone();
        let mut acc = Matrix::identity(&self.field, self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    pub fn hstack(&self, other: &Matrix) -> Result<Matrix> {
        self.check_field(other)?;
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch("hstack row counts differ".into()));
        }
        Ok(Matrix::from_fn(
            &self.field,
            self.rows,
            self.cols + other.cols,
            |i, j| {
                if j < self.cols {
                    self.get(i, j)
                } else {
                    other.get(i, j - self.cols)
                }
            },
        ))
    }

    pub fn vstack(&self, other: &Matrix) -> Result<Matrix> {
        self.check_field(other)?;
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch(
                "vstack column counts differ".into(),
            ));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Matrix {
            field: self.field.clone(),
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn vstack_all(field: &Field, cols: usize, parts: &[Matrix]) -> Result<Matrix> {
        let mut acc = Matrix::zeros(field, 0, cols);
        for p in parts {
            acc = acc.vstack(p)?;
        }
        Ok(acc)
    }

    pub fn block_diag(&self, other: &Matrix) -> Result<Matrix> {
        self.check_field(other)?;
        Ok(Matrix::from_fn(
            &self.field,
            self.rows + other.rows,
            self.cols + other.cols,
            |i, j| match (i < self.rows, j < self.cols) {
                (true, true) => self.get(i, j),
                (false, false) => other.get(i - self.rows, j - self.cols),
                _ => 0,
            },
        ))
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        Matrix::from_fn(&self.field, rows.len(), cols.len(), |i, j| {
            self.get(rows[i], cols[j])
        })
    }

    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        let rows: Vec<usize> = (0..self.rows).collect();
        self.submatrix(&rows, cols)
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let f = &self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(pr) = (row..m.rows).find(|&i| m.get(i, col) != 0) else {
                continue;
            };
            if pr != row {
                for j in 0..m.cols {
                    m.data.swap(pr * m.cols + j, row * m.cols + j);
                }
            }
            let inv = f.inv(m.get(row, col)).expect("pivot is nonzero");
            for j in col..m.cols {
                let v = m.get(row, j);
                m.set(row, j, f.mul(v, inv));
            }
            for i in 0..m.rows {
                if i == row {
                    continue;
                }
                let c = m.get(i, col);
                if c == 0 {
                    continue;
                }
                for j in col..m.cols {
                    let v = f.sub(m.get(i, j), f.mul(c, m.get(row, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the null space, as the columns of a `cols x k` matrix.
    pub fn kernel(&self) -> Matrix {
        let (r, pivots) = self.rref();
        let f = &self.field;
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Matrix::zeros(f, self.cols, free.len());
        for (k, &fc) in free.iter().enumerate() {
            out.set(fc, k, 1);
            for (i, &pc) in pivots.iter().enumerate() {
                out.set(pc, k, f.neg(r.get(i, fc)));
            }
        }
        out
    }

    /// Basis of the column space, chosen among the columns of `self`.
    pub fn image(&self) -> Matrix {
        let (_, pivots) = self.rref();
        self.select_columns(&pivots)
    }

    /// Some `X` with `self · X = b`, if one exists.
    pub fn solve(&self, b: &Matrix) -> Result<Option<Matrix>> {
        self.check_field(b)?;
        if self.rows != b.rows {
            return Err(Error::DimensionMismatch("solve: row counts differ".into()));
        }
        let aug = self.hstack(b)?;
        let (r, pivots) = aug.rref();
        if pivots.iter().any(|&c| c >= self.cols) {
            return Ok(None);
        }
        let mut x = Matrix::zeros(&self.field, self.cols, b.cols);
        for (i, &pc) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                x.set(pc, j, r.get(i, self.cols + j));
            }
        }
        Ok(Some(x))
    }

    /// Like [`Matrix::solve`] but insists on a solution.
    pub fn solve_exact(&self, b: &Matrix) -> Result<Matrix> {
        self.solve(b)?.ok_or(Error::Singular)
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(
                "inverse of a non-square matrix".into(),
            ));
        }
        let n = self.rows;
        let aug = self.hstack(&Matrix::identity(&self.field, n))?;
        let (r, pivots) = aug.rref();
        if pivots.len() < n || (n > 0 && pivots[n - 1] >= n) {
            return Err(Error::Singular);
        }
        Ok(Matrix::from_fn(&self.field, n, n, |i, j| r.get(i, n + j)))
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// Flatten column-major into a single column (the `vec` operator).
    pub fn vectorize(&self) -> Vec<Elem> {
        let mut v = Vec::with_capacity(self.rows * self.cols);
        for j in 0..self.cols {
            for i in 0..self.rows {
                v.push(self.get(i, j));
            }
        }
        v
    }

    pub fn unvectorize(field: &Field, rows: usize, cols: usize, v: &[Elem]) -> Matrix {
        Matrix::from_fn(field, rows, cols, |i, j| v[j * rows + i])
    }
}

/// Coordinates of the columns of `vectors` in the basis given by the columns
/// of `basis`. Fails if some vector is outside the span.
pub fn coordinates(basis: &Matrix, vectors: &Matrix) -> Result<Matrix> {
    basis
        .solve(vectors)?
        .ok_or_else(|| Error::DimensionMismatch("vector outside the spanned subspace".into()))
}

/// Whether the column span of `a` lies inside that of `b`.
pub fn span_contains(b: &Matrix, a: &Matrix) -> bool {
    matches!(b.solve(a), Ok(Some(_)))
}

/// Indices of standard basis vectors completing the columns of `basis`
/// (assumed independent) to a basis of the ambient space.
pub fn complement_indices(basis: &Matrix) -> Vec<usize> {
    let n = basis.rows();
    let id = Matrix::identity(basis.field(), n);
    let (_, pivots) = basis.hstack(&id).expect("same field").rref();
    pivots
        .into_iter()
        .filter(|&c| c >= basis.cols())
        .map(|c| c - basis.cols())
        .collect()
}
