//! Dense complex matrices in row-major order.
//!
//! Everything in the estimator chain is a small matrix (at most a few dozen
//! rows and columns), so the routines here favour plain loops over blocking.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::{Error, Result};

/// Relative pivot tolerance for Gauss-Jordan elimination.
pub const PIVOT_TOLERANCE: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        CMat { rows, cols, data }
    }

    /// Wraps row-major `data`; fails when its length is not `rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch { expected: rows * cols, actual: data.len() });
        }
        Ok(CMat { rows, cols, data })
    }

    /// Builds a matrix from `(re, im)` row literals. Panics on ragged rows.
    pub fn from_rows(rows: &[&[(f64, f64)]]) -> Self {
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * ncols);
        for row in rows {
            assert_eq!(row.len(), ncols, "ragged row literal");
            data.extend(row.iter().map(|&(re, im)| Complex64::new(re, im)));
        }
        CMat { rows: rows.len(), cols: ncols, data }
    }

    pub fn column(values: &[Complex64]) -> Self {
        CMat { rows: values.len(), cols: 1, data: values.to_vec() }
    }

    pub fn row_vector(values: &[Complex64]) -> Self {
        CMat { rows: 1, cols: values.len(), data: values.to_vec() }
    }

    /// Square diagonal matrix with `values` on the diagonal.
    pub fn diag(values: &[Complex64]) -> Self {
        let n = values.len();
        let mut m = CMat::zeros(n, n);
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
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
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Row `r` as a 1×cols matrix.
    pub fn row_mat(&self, r: usize) -> CMat {
        CMat::row_vector(self.row(r))
    }

    /// Rows `start..end` as a new matrix.
    pub fn row_block(&self, start: usize, end: usize) -> CMat {
        assert!(start <= end && end <= self.rows, "row block out of range");
        CMat { rows: end - start, cols: self.cols, data: self.data[start * self.cols..end * self.cols].to_vec() }
    }

    /// Columns `start..end` as a new matrix.
    pub fn col_block(&self, start: usize, end: usize) -> CMat {
        assert!(start <= end && end <= self.cols, "column block out of range");
        CMat::from_fn(self.rows, end - start, |r, c| self[(r, start + c)])
    }

    /// Entries in column-major order, i.e. `vec[A]`.
    pub fn vec_col_major(&self) -> impl Iterator<Item = Complex64> + '_ {
        (0..self.cols).flat_map(move |c| (0..self.rows).map(move |r| self[(r, c)]))
    }

    /// Inverse of [`CMat::vec_col_major`].
    pub fn from_col_major(rows: usize, cols: usize, values: &[Complex64]) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::LengthMismatch { expected: rows * cols, actual: values.len() });
        }
        Ok(CMat::from_fn(rows, cols, |r, c| values[c * rows + r]))
    }

    pub fn matmul(&self, rhs: &CMat) -> Result<CMat> {
        if self.cols != rhs.rows {
            return Err(self.mismatch("matmul", rhs));
        }
        let mut out = CMat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn hermitian(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn conj(&self) -> CMat {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> CMat {
        CMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| f(z)).collect() }
    }

    pub fn scale(&self, s: f64) -> CMat {
        self.map(|z| z * s)
    }

    pub fn add(&self, rhs: &CMat) -> Result<CMat> {
        self.zip_with("add", rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &CMat) -> Result<CMat> {
        self.zip_with("sub", rhs, |a, b| a - b)
    }

    fn zip_with(&self, op: &'static str, rhs: &CMat, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<CMat> {
        if self.shape() != rhs.shape() {
            return Err(self.mismatch(op, rhs));
        }
        let data = self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(CMat { rows: self.rows, cols: self.cols, data })
    }

    /// Inverse of a square matrix by Gauss-Jordan elimination with partial
    /// pivoting. A pivot whose magnitude falls below
    /// `PIVOT_TOLERANCE * max|a_ij|` is reported as singular.
    pub fn inverse(&self) -> Result<CMat> {
        if self.rows != self.cols {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let scale = self.data.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
        if n == 0 {
            return Ok(CMat::zeros(0, 0));
        }
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::Singular { column: 0, pivot: 0.0 });
        }
        let threshold = PIVOT_TOLERANCE * scale;
        let mut a = self.clone();
        let mut inv = CMat::identity(n);

        for col in 0..n {
            let (pivot_row, pivot_mag) =
                (col..n)
                    .map(|r| (r, a[(r, col)].norm()))
                    .fold((col, -1.0), |best, cand| if cand.1 > best.1 { cand } else { best });
            if pivot_mag < threshold {
                return Err(Error::Singular { column: col, pivot: pivot_mag });
            }
            if pivot_row != col {
                a.swap_rows(pivot_row, col);
                inv.swap_rows(pivot_row, col);
            }
            let p = ONE / a[(col, col)];
            for c in 0..n {
                a[(col, c)] *= p;
                inv[(col, c)] *= p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[(r, col)];
                if factor == ZERO {
                    continue;
                }
                for c in 0..n {
                    let ac = a[(col, c)];
                    let ic = inv[(col, c)];
                    a[(r, c)] -= factor * ac;
                    inv[(r, c)] -= factor * ic;
                }
            }
        }
        Ok(inv)
    }

    /// Moore-Penrose pseudoinverse of a full-rank matrix.
    ///
    /// Wide or square inputs use the right inverse `Aᴴ(AAᴴ)⁻¹`; tall inputs
    /// use the left inverse `(AᴴA)⁻¹Aᴴ`. Rank deficiency surfaces as a
    /// singular inner inverse.
    pub fn pinv(&self) -> Result<CMat> {
        let ah = self.hermitian();
        if self.rows <= self.cols {
            let gram = self.matmul(&ah)?;
            ah.matmul(&gram.inverse()?)
        } else {
            let gram = ah.matmul(self)?;
            gram.inverse()?.matmul(&ah)
        }
    }

    /// Frobenius norm.
    pub fn frobenius(&self) -> f64 {
        libm::sqrt(self.frobenius_sq())
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest entry-wise modulus of `self - rhs`. Panics on shape mismatch.
    pub fn max_abs_diff(&self, rhs: &CMat) -> f64 {
        assert_eq!(self.shape(), rhs.shape(), "max_abs_diff shape mismatch");
        self.data.iter().zip(&rhs.data).fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn mismatch(&self, op: &'static str, rhs: &CMat) -> Error {
        Error::DimensionMismatch {
            op,
            lhs_rows: self.rows,
            lhs_cols: self.cols,
            rhs_rows: rhs.rows,
            rhs_cols: rhs.cols,
        }
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = Complex64;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

/// `scale · exp(j·2π·q·w / n_cols)` for row `q` and column `w`, both from 0.
pub fn dft_matrix(n_rows: usize, n_cols: usize, scale: f64) -> CMat {
    let n = n_cols as f64;
    CMat::from_fn(n_rows, n_cols, |q, w| {
        // reduce the exponent first so large indices keep full phase accuracy
        let k = ((q as u128 * w as u128) % n_cols as u128) as f64;
        Complex64::from_polar(scale, TAU * k / n)
    })
}
