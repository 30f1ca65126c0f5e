use crate::error::{Error, Result};
use nalgebra::DMatrix;
use std::ops::Range;

/// Rectangular matrix with `lower` sub-diagonals and `upper` super-diagonals.
///
/// Storage is row-major over the band: row `i` keeps columns
/// `i - lower ..= i + upper` in a fixed-width slot.
#[derive(Clone, Debug, PartialEq)]
pub struct BandedMatrix {
    rows: usize,
    cols: usize,
    lower: usize,
    upper: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(rows: usize, cols: usize, lower: usize, upper: usize) -> Self {
        let width = lower + upper + 1;
        BandedMatrix { rows, cols, lower, upper, data: vec![0.0; rows * width] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        let mut a = Self::zeros(d.len(), d.len(), 0, 0);
        a.data.copy_from_slice(d);
        a
    }

    /// Symmetric tridiagonal matrix from its diagonal and off-diagonal.
    pub fn sym_tridiagonal(diag: &[f64], off: &[f64]) -> Self {
        let n = diag.len();
        assert!(off.len() + 1 >= n, "off-diagonal too short");
        let mut a = Self::zeros(n, n, 1, 1);
        for i in 0..n {
            a.set(i, i, diag[i]);
            if i + 1 < n {
                a.set(i, i + 1, off[i]);
                a.set(i + 1, i, off[i]);
            }
        }
        a
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn lower(&self) -> usize {
        self.lower
    }
    pub fn upper(&self) -> usize {
        self.upper
    }
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    fn width(&self) -> usize {
        self.lower + self.upper + 1
    }

    #[inline]
    pub fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.rows && j < self.cols && j + self.lower >= i && j <= i + self.upper
    }

    /// Columns of row `i` that lie inside the band.
    #[inline]
    pub fn row_range(&self, i: usize) -> Range<usize> {
        let lo = i.saturating_sub(self.lower);
        let hi = (i + self.upper + 1).min(self.cols);
        lo..hi.max(lo)
    }

    /// Rows of column `j` that lie inside the band.
    #[inline]
    pub fn col_range(&self, j: usize) -> Range<usize> {
        let lo = j.saturating_sub(self.upper);
        let hi = (j + self.lower + 1).min(self.rows);
        lo..hi.max(lo)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.data[i * self.width() + j + self.lower - i]
        } else {
            0.0
        }
    }

    /// Panics when `(i, j)` is outside the stored band.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(self.in_band(i, j), "entry ({i},{j}) outside band");
        let w = self.width();
        self.data[i * w + j + self.lower - i] = v;
    }

    #[inline]
    pub fn add_to(&mut self, i: usize, j: usize, v: f64) {
        assert!(self.in_band(i, j), "entry ({i},{j}) outside band");
        let w = self.width();
        self.data[i * w + j + self.lower - i] += v;
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j))
    }

    /// Copies the band of `a`. Fails if `a` has nonzeros outside it.
    pub fn from_dense(a: &DMatrix<f64>, lower: usize, upper: usize) -> Result<Self> {
        let mut b = Self::zeros(a.nrows(), a.ncols(), lower, upper);
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                let v = a[(i, j)];
                if b.in_band(i, j) {
                    b.set(i, j, v);
                } else if v != 0.0 {
                    return Err(Error::DimensionMismatch(format!(
                        "entry ({i},{j}) = {v} lies outside bandwidth ({lower},{upper})"
                    )));
                }
            }
        }
        Ok(b)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows, self.upper, self.lower);
        for i in 0..self.rows {
            for j in self.row_range(i) {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// Product with bandwidths `(l1 + l2, u1 + u2)`.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "matmul {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut c = Self::zeros(self.rows, other.cols, self.lower + other.lower, self.upper + other.upper);
        for i in 0..self.rows {
            for k in self.row_range(i) {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in other.row_range(k) {
                    c.add_to(i, j, a * other.get(k, j));
                }
            }
        }
        Ok(c)
    }

    /// Product chain, left to right.
    pub fn chain(mats: &[&Self]) -> Result<Self> {
        let (first, rest) = mats.split_first().expect("empty chain");
        rest.iter().try_fold((*first).clone(), |acc, m| acc.matmul(m))
    }

    fn combine(&self, other: &Self, alpha: f64, beta: f64) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch(format!(
                "add {:?} and {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let mut c = Self::zeros(self.rows, self.cols, self.lower.max(other.lower), self.upper.max(other.upper));
        for i in 0..self.rows {
            for j in self.row_range(i) {
                c.add_to(i, j, alpha * self.get(i, j));
            }
            for j in other.row_range(i) {
                c.add_to(i, j, beta * other.get(i, j));
            }
        }
        Ok(c)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, 1.0, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, 1.0, -1.0)
    }

    /// `alpha * self + beta * other`.
    pub fn axpby(&self, alpha: f64, other: &Self, beta: f64) -> Result<Self> {
        self.combine(other, alpha, beta)
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut c = self.clone();
        c.data.iter_mut().for_each(|v| *v *= s);
        c
    }

    /// `s * I - self` for square matrices.
    pub fn shift_neg(&self, s: f64) -> Self {
        let mut c = self.scale(-1.0);
        for i in 0..self.rows.min(self.cols) {
            c.add_to(i, i, s);
        }
        c
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "matvec with {} columns and vector of length {}",
                self.cols,
                x.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row_range(i).map(|j| self.get(i, j) * x[j]).sum())
            .collect())
    }

    /// Matrix-vector product that zero-pads or ignores the tail of `x`.
    pub fn matvec_padded(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| {
                self.row_range(i)
                    .filter(|&j| j < x.len())
                    .map(|j| self.get(i, j) * x[j])
                    .sum()
            })
            .collect()
    }

    /// Leading `rows x cols` section, keeping the bandwidths.
    pub fn truncate(&self, rows: usize, cols: usize) -> Self {
        let mut c = Self::zeros(rows, cols, self.lower, self.upper);
        for i in 0..rows.min(self.rows) {
            for j in c.row_range(i) {
                if j < self.cols {
                    c.set(i, j, self.get(i, j));
                }
            }
        }
        c
    }

    /// Same entries, stored with different bandwidths. Entries that would
    /// fall outside the new band must be (numerically) zero and are dropped.
    pub fn with_bandwidths(&self, lower: usize, upper: usize) -> Self {
        let mut c = Self::zeros(self.rows, self.cols, lower, upper);
        for i in 0..self.rows {
            for j in self.row_range(i) {
                if c.in_band(i, j) {
                    c.set(i, j, self.get(i, j));
                }
            }
        }
        c
    }

    /// Smallest `(lower, upper)` covering all entries with `|a_ij| > tol`.
    pub fn measured_bandwidths(&self, tol: f64) -> (usize, usize) {
        let (mut l, mut u) = (0, 0);
        for i in 0..self.rows {
            for j in self.row_range(i) {
                if self.get(i, j).abs() > tol {
                    if i > j {
                        l = l.max(i - j);
                    } else {
                        u = u.max(j - i);
                    }
                }
            }
        }
        (l, u)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row_range(i).map(|j| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let b = self.lower.max(self.upper);
        (0..self.rows).all(|i| {
            (i..(i + b + 1).min(self.cols)).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= rel_tol * scale)
        })
    }

    /// Solves `self * x = b` for upper-triangular `self` on the leading
    /// `b.len()` block.
    pub fn solve_upper(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = b.len();
        if n > self.rows.min(self.cols) {
            return Err(Error::DimensionMismatch(format!("upper solve of length {n} with {:?}", self.shape())));
        }
        let mut x = b.to_vec();
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in (i + 1)..(i + self.upper + 1).min(n) {
                s -= self.get(i, j) * x[j];
            }
            let d = self.get(i, i);
            if d == 0.0 {
                return Err(Error::SingularR { index: i });
            }
            x[i] = s / d;
        }
        Ok(x)
    }

    /// Solves `self^T * x = b` for upper-triangular `self`.
    pub fn solve_upper_transpose(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = b.len();
        if n > self.rows.min(self.cols) {
            return Err(Error::DimensionMismatch(format!("lower solve of length {n} with {:?}", self.shape())));
        }
        let mut x = b.to_vec();
        for i in 0..n {
            let mut s = x[i];
            for k in i.saturating_sub(self.upper)..i {
                s -= self.get(k, i) * x[k];
            }
            let d = self.get(i, i);
            if d == 0.0 {
                return Err(Error::SingularR { index: i });
            }
            x[i] = s / d;
        }
        Ok(x)
    }
}
