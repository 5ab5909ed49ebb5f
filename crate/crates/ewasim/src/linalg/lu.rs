//! Complex LU factorization with partial pivoting.

use super::matrix::{ComplexMatrix, ComplexVector};
use super::{C64, LinalgError};

/// LU factors of a square matrix, `P*A = L*U` with unit-diagonal `L`.
pub struct Lu {
    lu: ComplexMatrix,
    piv: Vec<usize>,
}

impl Lu {
    /// Factor `a`. Pivots smaller than `pivot_floor` are replaced by the floor
    /// (keeping their phase) when `pivot_floor > 0`; with a zero floor an
    /// exactly singular column is an error. The floored variant is what
    /// inverse iteration needs on deliberately near-singular shifts.
    pub fn factor(a: &ComplexMatrix, pivot_floor: f64) -> Result<Self, LinalgError> {
        a.ensure_square()?;
        let n = a.rows();
        let mut lu = a.clone();
        let mut piv = Vec::with_capacity(n);
        for k in 0..n {
            let mut p = k;
            let mut best = lu.get(k, k).norm();
            for i in k + 1..n {
                let m = lu.get(i, k).norm();
                if m > best {
                    best = m;
                    p = i;
                }
            }
            piv.push(p);
            if p != k {
                for j in 0..n {
                    let tmp = lu.get(k, j);
                    lu.set(k, j, lu.get(p, j));
                    lu.set(p, j, tmp);
                }
            }
            let mut pivot = lu.get(k, k);
            if pivot.norm() < pivot_floor.max(f64::MIN_POSITIVE) {
                if pivot_floor <= 0.0 {
                    return Err(LinalgError::Singular {
                        context: format!("LU factorization (column {k})"),
                    });
                }
                pivot = if pivot == C64::ZERO {
                    C64::new(pivot_floor, 0.0)
                } else {
                    pivot * C64::new(pivot_floor / pivot.norm(), 0.0)
                };
                lu.set(k, k, pivot);
            }
            for i in k + 1..n {
                let factor = lu.get(i, k) / pivot;
                lu.set(i, k, factor);
                if factor == C64::ZERO {
                    continue;
                }
                for j in k + 1..n {
                    let v = lu.get(i, j) - factor * lu.get(k, j);
                    lu.set(i, j, v);
                }
            }
        }
        Ok(Self { lu, piv })
    }

    pub fn solve_vec(&self, b: &ComplexVector) -> ComplexVector {
        let n = self.lu.rows();
        assert_eq!(b.dim(), n, "rhs dimension mismatch");
        let mut x: Vec<C64> = b.data().to_vec();
        for (k, &p) in self.piv.iter().enumerate() {
            x.swap(k, p);
        }
        for k in 0..n {
            for i in k + 1..n {
                let f = self.lu.get(i, k);
                let v = x[i] - f * x[k];
                x[i] = v;
            }
        }
        for k in (0..n).rev() {
            let mut acc = x[k];
            for j in k + 1..n {
                acc -= self.lu.get(k, j) * x[j];
            }
            x[k] = acc / self.lu.get(k, k);
        }
        ComplexVector::new(x)
    }

    pub fn solve_mat(&self, b: &ComplexMatrix) -> ComplexMatrix {
        let n = self.lu.rows();
        assert_eq!(b.rows(), n, "rhs dimension mismatch");
        let mut out = ComplexMatrix::zeros(n, b.cols());
        for j in 0..b.cols() {
            let col = ComplexVector::new((0..n).map(|i| b.get(i, j)).collect());
            let x = self.solve_vec(&col);
            for i in 0..n {
                out.set(i, j, x.get(i));
            }
        }
        out
    }
}
