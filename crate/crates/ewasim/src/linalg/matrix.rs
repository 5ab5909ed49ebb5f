//! Dense complex matrix and vector types, stored row-major.

use super::{C64, LinalgError};

/// A dense complex matrix with row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    /// Build from raw row-major data. Panics if `data.len() != rows * cols`.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), rows * cols, "storage length mismatch");
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::new(rows, cols, vec![C64::ZERO; rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, C64::ONE);
        }
        m
    }

    /// Build entrywise from a closure over `(row, col)`.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::new(rows, cols, data)
    }

    /// Build from nested rows; fails on ragged input or empty dimensions.
    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self, LinalgError> {
        let nr = rows.len();
        let nc = rows.first().map_or(0, |r| r.len());
        if nr == 0 || nc == 0 {
            return Err(LinalgError::Dimension {
                context: "matrix must have at least one row and one column".into(),
            });
        }
        let mut data = Vec::with_capacity(nr * nc);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != nc {
                return Err(LinalgError::Dimension {
                    context: format!("row {i} has {} entries, expected {nc}", row.len()),
                });
            }
            data.extend(row);
        }
        Ok(Self::new(nr, nc, data))
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { entries[i] } else { C64::ZERO })
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
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        self.data[i * self.cols + j] = value;
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Self::new(self.rows, self.cols, data)
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Self::new(self.rows, self.cols, data)
    }

    pub fn scale(&self, factor: C64) -> Self {
        let data = self.data.iter().map(|a| a * factor).collect();
        Self::new(self.rows, self.cols, data)
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == C64::ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &ComplexVector) -> ComplexVector {
        assert_eq!(self.cols, v.dim(), "matrix-vector dimension mismatch");
        let mut out = vec![C64::ZERO; self.rows];
        for i in 0..self.rows {
            let mut acc = C64::ZERO;
            for j in 0..self.cols {
                acc += self.get(i, j) * v.get(j);
            }
            out[i] = acc;
        }
        ComplexVector::new(out)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.get(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn fro_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest `|a_ij - conj(a_ji)|` over all entries; zero for Hermitian.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// First non-finite entry, if any.
    pub fn find_non_finite(&self) -> Option<(usize, usize)> {
        for i in 0..self.rows {
            for j in 0..self.cols {
                let z = self.get(i, j);
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Copy `block` into this matrix with its top-left corner at `(i0, j0)`.
    pub fn set_block(&mut self, i0: usize, j0: usize, block: &Self) {
        assert!(i0 + block.rows <= self.rows && j0 + block.cols <= self.cols);
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(i0 + i, j0 + j, block.get(i, j));
            }
        }
    }

    /// Extract the `nr x nc` block with top-left corner at `(i0, j0)`.
    pub fn block(&self, i0: usize, j0: usize, nr: usize, nc: usize) -> Self {
        assert!(i0 + nr <= self.rows && j0 + nc <= self.cols);
        Self::from_fn(nr, nc, |i, j| self.get(i0 + i, j0 + j))
    }

    /// Largest entrywise difference to another matrix of the same shape.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub(crate) fn ensure_square(&self) -> Result<(), LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(())
    }

    pub(crate) fn ensure_finite(&self) -> Result<(), LinalgError> {
        match self.find_non_finite() {
            Some((row, col)) => Err(LinalgError::NonFinite { row, col }),
            None => Ok(()),
        }
    }

    pub(crate) fn ensure_supported_dim(&self) -> Result<(), LinalgError> {
        let dim = self.rows.max(self.cols);
        if dim > super::MAX_DIM {
            return Err(LinalgError::TooLarge {
                dim,
                max: super::MAX_DIM,
            });
        }
        Ok(())
    }
}

/// A dense complex vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector {
    data: Vec<C64>,
}

impl ComplexVector {
    pub fn new(data: Vec<C64>) -> Self {
        Self { data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::new(vec![C64::ZERO; dim])
    }

    /// Basis vector `|k>` in a `dim`-dimensional space.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index out of range");
        let mut v = Self::zeros(dim);
        v.data[k] = C64::ONE;
        v
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn get(&self, i: usize) -> C64 {
        self.data[i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: C64) {
        self.data[i] = value;
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Inner product `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> C64 {
        assert_eq!(self.dim(), other.dim(), "inner product dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        Self::new(self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        Self::new(self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self::new(self.data.iter().map(|a| a * factor).collect())
    }

    /// Unit-norm copy; `None` when the norm underflows.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        if n < 1e-300 {
            return None;
        }
        Some(self.scale(C64::new(1.0 / n, 0.0)))
    }

    /// Copy of `len` entries starting at `start`.
    pub fn segment(&self, start: usize, len: usize) -> Self {
        assert!(start + len <= self.dim());
        Self::new(self.data[start..start + len].to_vec())
    }

    /// Embed into a larger space with this vector's entries at `offset`.
    pub fn embed(&self, full_dim: usize, offset: usize) -> Self {
        assert!(offset + self.dim() <= full_dim);
        let mut out = Self::zeros(full_dim);
        for (i, z) in self.data.iter().enumerate() {
            out.data[offset + i] = *z;
        }
        out
    }

    /// Outer product `|self><other|`.
    pub fn outer(&self, other: &Self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim(), other.dim(), |i, j| {
            self.data[i] * other.data[j].conj()
        })
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}
