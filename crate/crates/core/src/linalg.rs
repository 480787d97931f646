//! Small dense and banded direct solvers.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| crate::scalar::dot(self.row(i), x)).collect()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &v| m.max(v.abs()))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }
}

impl<T> std::ops::Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for DenseMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Clone, Debug)]
pub struct LuFactor<T> {
    lu: DenseMatrix<T>,
    perm: Vec<usize>,
}

impl<T: Real> LuFactor<T> {
    pub fn new(mut a: DenseMatrix<T>) -> Result<Self> {
        assert_eq!(a.rows, a.cols, "LU needs a square matrix");
        let n = a.rows;
        let scale = a.max_abs();
        let tiny = scale * T::epsilon() * T::lit(1e-3);
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            let mut best = a[(k, k)].abs();
            for i in k + 1..n {
                let v = a[(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if !(best > tiny) {
                return Err(Error::SingularMatrix { column: k });
            }
            if p != k {
                perm.swap(p, k);
                let (lo, hi) = a.data.split_at_mut(p * n);
                lo[k * n..(k + 1) * n].swap_with_slice(&mut hi[..n]);
            }
            let pivot = a[(k, k)];
            let (head, tail) = a.data.split_at_mut((k + 1) * n);
            let pivot_row = &head[k * n..(k + 1) * n];
            for row in tail.chunks_exact_mut(n) {
                let f = row[k] / pivot;
                row[k] = f;
                if f != T::zero() {
                    for j in k + 1..n {
                        row[j] -= f * pivot_row[j];
                    }
                }
            }
        }
        Ok(Self { lu: a, perm })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let mut s = x[i];
            for j in 0..i {
                s -= row[j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let mut s = x[i];
            for j in i + 1..n {
                s -= row[j] * x[j];
            }
            x[i] = s / row[i];
        }
        x
    }

    /// Ratio of the smallest to the largest pivot magnitude.
    pub fn pivot_ratio(&self) -> T {
        let d = (0..self.dim()).map(|i| self.lu[(i, i)].abs());
        let (lo, hi) = d.fold((T::infinity(), T::zero()), |(lo, hi), v| (lo.min(v), hi.max(v)));
        if hi == T::zero() {
            T::zero()
        } else {
            lo / hi
        }
    }
}

/// Exact 1-norm condition number `||A||_1 ||A^-1||_1`, for small matrices.
pub fn condition_1norm<T: Real>(a: &DenseMatrix<T>, lu: &LuFactor<T>) -> T {
    let n = a.rows();
    let col_norm = |m: &dyn Fn(usize, usize) -> T| {
        (0..n)
            .map(|j| (0..n).map(|i| m(i, j).abs()).sum::<T>())
            .fold(T::zero(), T::max)
    };
    let a_norm = col_norm(&|i, j| a[(i, j)]);
    let mut inv_norm = T::zero();
    for j in 0..n {
        let mut e = vec![T::zero(); n];
        e[j] = T::one();
        let col = lu.solve(&e);
        inv_norm = inv_norm.max(col.iter().map(|v| v.abs()).sum());
    }
    a_norm * inv_norm
}

/// General band matrix LU with partial pivoting (LAPACK `gbtrf` layout).
///
/// Stores `kl` sub-diagonals and `kl + ku` super-diagonals so fill-in from
/// row interchanges fits.
#[derive(Clone, Debug)]
pub struct BandLu<T> {
    n: usize,
    kl: usize,
    ku: usize,
    ld: usize,
    ab: Vec<T>,
    piv: Vec<usize>,
}

impl<T: Real> BandLu<T> {
    /// Factors the band matrix whose entries are supplied by `entry(i, j)`
    /// for `|i - j|` within the band.
    pub fn new(n: usize, kl: usize, ku: usize, entry: impl Fn(usize, usize) -> T) -> Result<Self> {
        let ld = 2 * kl + ku + 1;
        let mut ab = vec![T::zero(); ld * n];
        let idx = |i: usize, j: usize| j * ld + (kl + ku + i - j);
        let mut scale = T::zero();
        for j in 0..n {
            let i0 = j.saturating_sub(ku);
            let i1 = (j + kl).min(n - 1);
            for i in i0..=i1 {
                let v = entry(i, j);
                scale = scale.max(v.abs());
                ab[idx(i, j)] = v;
            }
        }
        let tiny = scale * T::epsilon() * T::lit(1e-3);
        let mut piv = vec![0; n];
        let kv = kl + ku;
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = ab[idx(k, k)].abs();
            for i in k + 1..=last {
                let v = ab[idx(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            piv[k] = p;
            if !(best > tiny) {
                return Err(Error::SingularMatrix { column: k });
            }
            let jlast = (k + kv).min(n - 1);
            if p != k {
                for j in k..=jlast {
                    ab.swap(idx(k, j), idx(p, j));
                }
            }
            let pivot = ab[idx(k, k)];
            for i in k + 1..=last {
                let f = ab[idx(i, k)] / pivot;
                ab[idx(i, k)] = f;
                if f != T::zero() {
                    for j in k + 1..=jlast {
                        let u = ab[idx(k, j)];
                        ab[idx(i, j)] -= f * u;
                    }
                }
            }
        }
        Ok(Self { n, kl, ku, ld, ab, piv })
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        let (kl, kv, ld) = (self.kl, self.kl + self.ku, self.ld);
        let idx = |i: usize, j: usize| j * ld + (kv + i - j);
        let mut x = b.to_vec();
        for k in 0..n {
            let p = self.piv[k];
            if p != k {
                x.swap(p, k);
            }
            let xk = x[k];
            for i in k + 1..=(k + kl).min(n - 1) {
                x[i] -= self.ab[idx(i, k)] * xk;
            }
        }
        for k in (0..n).rev() {
            let mut s = x[k];
            for j in k + 1..=(k + kv).min(n - 1) {
                s -= self.ab[idx(k, j)] * x[j];
            }
            x[k] = s / self.ab[idx(k, k)];
        }
        x
    }
}
