//! Small dense linear algebra used by the model and the LP solver.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Copy + Default> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::default(); rows * cols],
        }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} values do not fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let data = rows.iter().flatten().copied().collect();
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> T {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [T] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }
}

impl<T: Real> DenseMatrix<T> {
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols, "matrix-vector dimension mismatch");
        (0..self.rows).map(|r| dot(self.row(r), x)).collect()
    }

    pub fn scaled(&self, factor: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| v * factor).collect(),
        }
    }
}

#[inline]
pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

#[inline]
pub fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// Orthonormal basis of the span of a set of row vectors, kept together with
/// the triangular factor that expresses each accepted row in that basis.
///
/// Row `i` of the accepted set equals `sum_{j <= i} r[j][i] * q[j]`.
#[derive(Debug, Clone)]
pub struct RowBasis<T> {
    dim: usize,
    q: Vec<Vec<T>>,
    // r[j][i], upper triangular, stored by column i
    r_cols: Vec<Vec<T>>,
}

impl<T: Real> RowBasis<T> {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            q: Vec::new(),
            r_cols: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    /// Coefficients of `y` in the orthonormal basis, and the residual of `y`
    /// orthogonal to the span. Two passes of modified Gram-Schmidt.
    pub fn split(&self, y: &[T]) -> (Vec<T>, Vec<T>) {
        let mut resid = y.to_vec();
        let mut coeff = vec![T::zero(); self.q.len()];
        for _ in 0..2 {
            for (c, q) in coeff.iter_mut().zip(&self.q) {
                let a = dot(q, &resid);
                *c += a;
                for (r, &qv) in resid.iter_mut().zip(q) {
                    *r -= a * qv;
                }
            }
        }
        (coeff, resid)
    }

    /// Component of `y` orthogonal to the span.
    pub fn project_out(&self, y: &[T]) -> Vec<T> {
        self.split(y).1
    }

    /// Appends `row` if it is independent of the current span (relative
    /// residual above `tol`). Returns whether it was accepted.
    pub fn push(&mut self, row: &[T], tol: T) -> bool {
        debug_assert_eq!(row.len(), self.dim);
        let scale = norm(row);
        if scale <= T::min_positive_value() {
            return false;
        }
        let (mut coeff, resid) = self.split(row);
        let rn = norm(&resid);
        if rn <= tol * scale {
            return false;
        }
        coeff.push(rn);
        self.q.push(resid.iter().map(|&v| v / rn).collect());
        self.r_cols.push(coeff);
        true
    }

    /// Solves `R z = b` (back substitution) where `b` is indexed by basis vector.
    pub fn solve_upper(&self, b: &[T]) -> Vec<T> {
        let k = self.q.len();
        let mut z = vec![T::zero(); k];
        for i in (0..k).rev() {
            let mut acc = b[i];
            for (j, zj) in z.iter().enumerate().skip(i + 1) {
                acc -= self.r_cols[j][i] * *zj;
            }
            z[i] = acc / self.r_cols[i][i];
        }
        z
    }

    /// Solves `R^T z = b` (forward substitution).
    pub fn solve_lower_transposed(&self, b: &[T]) -> Vec<T> {
        let k = self.q.len();
        let mut z = vec![T::zero(); k];
        for i in 0..k {
            let col = &self.r_cols[i];
            let mut acc = b[i];
            for j in 0..i {
                acc -= col[j] * z[j];
            }
            z[i] = acc / col[i];
        }
        z
    }

    /// Least-squares multipliers `lambda` with `sum_i lambda_i row_i ~= y`,
    /// plus the residual `y - sum_i lambda_i row_i`.
    pub fn express(&self, y: &[T]) -> (Vec<T>, Vec<T>) {
        let (coeff, resid) = self.split(y);
        (self.solve_upper(&coeff), resid)
    }

    /// Minimum-norm `delta` in the span with `row_i . delta = rhs_i` for every
    /// accepted row.
    pub fn min_norm_correction(&self, rhs: &[T]) -> Vec<T> {
        let z = self.solve_lower_transposed(rhs);
        let mut delta = vec![T::zero(); self.dim];
        for (zj, q) in z.iter().zip(&self.q) {
            for (d, &qv) in delta.iter_mut().zip(q) {
                *d += *zj * qv;
            }
        }
        delta
    }
}

/// Solves the square complex system `a x = b` by Gaussian elimination with
/// partial pivoting. `a` is row-major `n x n`.
pub fn solve_complex<T: Real>(
    mut a: Vec<Complex<T>>,
    mut b: Vec<Complex<T>>,
    n: usize,
) -> Result<Vec<Complex<T>>> {
    if a.len() != n * n || b.len() != n {
        return Err(Error::Dimension("complex solve needs a square system".into()));
    }
    let scale = a.iter().map(|v| v.norm()).fold(T::zero(), T::max);
    if scale <= T::zero() {
        return Err(Error::RankDeficient);
    }
    let tol = T::lit(1e3) * T::epsilon() * scale * T::from_usize(n).unwrap_or_else(T::one);
    for col in 0..n {
        let (piv, piv_mag) = (col..n)
            .map(|r| (r, a[r * n + col].norm()))
            .fold((col, T::neg_infinity()), |best, cur| if cur.1 > best.1 { cur } else { best });
        if piv_mag <= tol {
            return Err(Error::RankDeficient);
        }
        if piv != col {
            for c in 0..n {
                a.swap(piv * n + c, col * n + c);
            }
            b.swap(piv, col);
        }
        let p = a[col * n + col];
        for r in col + 1..n {
            let f = a[r * n + col] / p;
            if f == Complex::new(T::zero(), T::zero()) {
                continue;
            }
            for c in col..n {
                let v = a[col * n + c];
                a[r * n + c] -= f * v;
            }
            let bc = b[col];
            b[r] -= f * bc;
        }
    }
    let mut x = vec![Complex::new(T::zero(), T::zero()); n];
    for r in (0..n).rev() {
        let mut acc = b[r];
        for c in r + 1..n {
            acc -= a[r * n + c] * x[c];
        }
        x[r] = acc / a[r * n + r];
    }
    Ok(x)
}
