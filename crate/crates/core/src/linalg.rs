//! Dense row-major matrices, Hadamard powers and the Householder QR used for
//! every least-squares fit in the crate.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Wraps row-major `data`.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                what: "matrix data length",
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    what: "row length",
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diagonal_from(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
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

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Entrywise product. Panics on shape mismatch.
    pub fn hadamard(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a * b)
                .collect(),
        }
    }

    /// `Σᵢⱼ aᵢⱼ bᵢⱼ`, i.e. `tr(A′B)`.
    pub fn frobenius_dot(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    /// `tr(AB)` without forming the product.
    pub fn trace_of_product(&self, other: &Matrix) -> f64 {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = 0.0;
        for i in 0..self.rows {
            let row = self.row(i);
            for (k, &a) in row.iter().enumerate() {
                acc += a * other[(k, i)];
            }
        }
        acc
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len());
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `A′x`.
    pub fn t_matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.rows, x.len());
        let mut out = vec![0.0; self.cols];
        for (i, &xi) in x.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += a * xi;
            }
        }
        out
    }

    /// `x′ A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        dot(x, &self.matvec(y))
    }

    /// `AB`.
    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul inner dimension");
        let mut out = Matrix::zeros(self.rows, other.cols);
        gemm(
            self.rows,
            self.cols,
            other.cols,
            (&self.data, self.cols as isize, 1),
            (&other.data, other.cols as isize, 1),
            &mut out.data,
        );
        out
    }

    /// `AB′`.
    pub fn matmul_t(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols, "matmul_t inner dimension");
        let mut out = Matrix::zeros(self.rows, other.rows);
        gemm(
            self.rows,
            self.cols,
            other.rows,
            (&self.data, self.cols as isize, 1),
            (&other.data, 1, other.cols as isize),
            &mut out.data,
        );
        out
    }

    /// `A′B`.
    pub fn t_matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows, "t_matmul inner dimension");
        let mut out = Matrix::zeros(self.cols, other.cols);
        gemm(
            self.cols,
            self.rows,
            other.cols,
            (&self.data, 1, self.cols as isize),
            (&other.data, other.cols as isize, 1),
            &mut out.data,
        );
        out
    }

    /// `A D` for diagonal `D = diag(d)`.
    pub fn scale_columns(&self, d: &[f64]) -> Matrix {
        assert_eq!(self.cols, d.len());
        let mut out = self.clone();
        for i in 0..self.rows {
            for (v, s) in out.data[i * self.cols..(i + 1) * self.cols].iter_mut().zip(d) {
                *v *= s;
            }
        }
        out
    }

    /// `D A` for diagonal `D = diag(d)`.
    pub fn scale_rows(&self, d: &[f64]) -> Matrix {
        assert_eq!(self.rows, d.len());
        let mut out = self.clone();
        for (i, s) in d.iter().enumerate() {
            for v in &mut out.data[i * self.cols..(i + 1) * self.cols] {
                *v *= s;
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| libm::fabs(a - b))
            .fold(0.0, f64::max)
    }

    pub fn max_asymmetry(&self) -> f64 {
        assert!(self.is_square());
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max(libm::fabs(self[(i, j)] - self[(j, i)]));
            }
        }
        worst
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `C = A B` with `A` m×k and `B` k×n given as (data, row stride, col stride);
/// `C` is row-major m×n and is overwritten.
fn gemm(
    m: usize,
    k: usize,
    n: usize,
    a: (&[f64], isize, isize),
    b: (&[f64], isize, isize),
    c: &mut [f64],
) {
    assert!(a.0.len() >= m * k && b.0.len() >= k * n && c.len() == m * n);
    if m == 0 || n == 0 {
        return;
    }
    if k == 0 {
        c.fill(0.0);
        return;
    }
    // SAFETY: the asserts above bound every access made with the given
    // strides, which describe dense m×k, k×n and m×n layouts.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.0.as_ptr(),
            a.1,
            a.2,
            b.0.as_ptr(),
            b.1,
            b.2,
            0.0,
            c.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}

/// Entrywise `k`-th power `M^∘k`. `k = 0` is treated as `k = 1`.
pub fn hadamard_power(m: &Matrix, k: u32) -> Matrix {
    let k = k.max(1);
    m.map(|v| powi(v, k))
}

#[inline]
pub(crate) fn powi(v: f64, k: u32) -> f64 {
    let mut acc = 1.0;
    for _ in 0..k {
        acc *= v;
    }
    acc
}

/// Column-pivoted Householder QR of a tall matrix, stored column-major.
///
/// Column `k` of the factorization corresponds to input column `perm[k]`.
/// Reflector `k` is `I − τₖ vₖvₖ′` with `vₖ[k] = 1` implied and the remaining
/// entries held below the diagonal of `qr`.
#[derive(Debug, Clone)]
pub struct HouseholderQr {
    n: usize,
    p: usize,
    /// Column-major n×p: R on and above the diagonal, reflectors below.
    qr: Vec<f64>,
    tau: Vec<f64>,
    perm: Vec<usize>,
}

/// Relative cutoff on `|R_kk| / |R_00|` below which a column is treated as
/// linearly dependent on the columns already factored.
pub const RANK_TOLERANCE: f64 = 1e-10;

impl HouseholderQr {
    /// Factorizes `x` (n×p, n ≥ p). Fails with `RankDeficient` naming every
    /// column involved in a near-linear dependency.
    pub fn factor(x: &Matrix) -> Result<Self> {
        let (n, p) = (x.rows(), x.cols());
        if n < p || p == 0 {
            return Err(Error::InvalidShape { n, p });
        }
        let mut a = vec![0.0; n * p];
        for i in 0..n {
            for j in 0..p {
                a[j * n + i] = x[(i, j)];
            }
        }
        let mut tau = vec![0.0; p];
        let mut perm: Vec<usize> = (0..p).collect();
        let mut r00 = 0.0;
        let mut deficient_from = None;

        for k in 0..p {
            // Pivot on the largest remaining column norm.
            let mut best = k;
            let mut best_norm = -1.0;
            for j in k..p {
                let col = &a[j * n + k..(j + 1) * n];
                let s = dot(col, col);
                if s > best_norm {
                    best_norm = s;
                    best = j;
                }
            }
            if best != k {
                for i in 0..n {
                    a.swap(k * n + i, best * n + i);
                }
                perm.swap(k, best);
            }

            let (head, tail) = a.split_at_mut((k + 1) * n);
            let col = &mut head[k * n + k..];
            let alpha = col[0];
            let sigma: f64 = dot(&col[1..], &col[1..]);
            let norm = libm::sqrt(alpha * alpha + sigma);
            let rkk = if alpha > 0.0 { -norm } else { norm };

            if k == 0 {
                r00 = norm;
            }
            if norm == 0.0 || norm <= RANK_TOLERANCE * r00 {
                deficient_from = Some(k);
                break;
            }

            let v0 = alpha - rkk;
            for v in &mut col[1..] {
                *v /= v0;
            }
            let t = -v0 / rkk;
            tau[k] = t;
            col[0] = rkk;

            let v = &col[1..];
            for j in 0..(p - k - 1) {
                let target = &mut tail[j * n + k..(j + 1) * n];
                let s = target[0] + dot(v, &target[1..]);
                let ts = t * s;
                target[0] -= ts;
                for (y, vi) in target[1..].iter_mut().zip(v) {
                    *y -= ts * vi;
                }
            }
        }

        let qr = Self { n, p, qr: a, tau, perm };
        if let Some(k) = deficient_from {
            return Err(Error::RankDeficient {
                columns: qr.dependent_columns(k),
            });
        }
        Ok(qr)
    }

    /// Columns taking part in a dependency once the factorization stalled at
    /// step `k`: each trailing column plus the leading columns that express it.
    fn dependent_columns(&self, k: usize) -> Vec<usize> {
        let n = self.n;
        let mut involved = vec![false; self.p];
        for m in k..self.p {
            involved[self.perm[m]] = true;
            // Solve R[..k, ..k] z = R[..k, m] (the first k rotations were
            // applied to every trailing column before stalling).
            let mut z: Vec<f64> = (0..k).map(|i| self.qr[m * n + i]).collect();
            for i in (0..k).rev() {
                let mut s = z[i];
                for j in (i + 1)..k {
                    s -= self.qr[j * n + i] * z[j];
                }
                z[i] = s / self.qr[i * n + i];
            }
            let scale = z.iter().fold(0.0f64, |acc, v| acc.max(libm::fabs(*v)));
            for (i, zi) in z.iter().enumerate() {
                if scale > 0.0 && libm::fabs(*zi) > 1e-8 * scale {
                    involved[self.perm[i]] = true;
                }
            }
        }
        (0..self.p).filter(|&j| involved[j]).collect()
    }

    pub fn nrows(&self) -> usize {
        self.n
    }

    pub fn ncols(&self) -> usize {
        self.p
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    /// Diagonal of R in pivot order.
    pub fn r_diagonal(&self) -> Vec<f64> {
        (0..self.p).map(|k| self.qr[k * self.n + k]).collect()
    }

    /// Applies `Q′` in place to an n-vector.
    pub fn apply_qt(&self, y: &mut [f64]) {
        assert_eq!(y.len(), self.n);
        for k in 0..self.p {
            self.reflect(k, y);
        }
    }

    /// Applies `Q` in place to an n-vector.
    pub fn apply_q(&self, y: &mut [f64]) {
        assert_eq!(y.len(), self.n);
        for k in (0..self.p).rev() {
            self.reflect(k, y);
        }
    }

    #[inline]
    fn reflect(&self, k: usize, y: &mut [f64]) {
        let n = self.n;
        let v = &self.qr[k * n + k + 1..(k + 1) * n];
        let s = y[k] + dot(v, &y[k + 1..]);
        let ts = self.tau[k] * s;
        y[k] -= ts;
        for (yi, vi) in y[k + 1..].iter_mut().zip(v) {
            *yi -= ts * vi;
        }
    }

    /// Least-squares coefficients (in original column order) and residuals.
    pub fn solve(&self, y: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let (n, p) = (self.n, self.p);
        let mut qty = y.to_vec();
        self.apply_qt(&mut qty);
        let mut z = qty[..p].to_vec();
        for i in (0..p).rev() {
            let mut s = z[i];
            for j in (i + 1)..p {
                s -= self.qr[j * n + i] * z[j];
            }
            z[i] = s / self.qr[i * n + i];
        }
        let mut beta = vec![0.0; p];
        for (k, &c) in self.perm.iter().enumerate() {
            beta[c] = z[k];
        }
        let mut resid = qty;
        resid[..p].fill(0.0);
        self.apply_q(&mut resid);
        (beta, resid)
    }

    /// Thin orthonormal basis `Q` (n×p, row-major) of the column space.
    pub fn thin_q(&self) -> Matrix {
        let (n, p) = (self.n, self.p);
        // Column-major scratch, one unit vector per column, then Q applied.
        let mut cols = vec![0.0; n * p];
        for j in 0..p {
            let c = &mut cols[j * n..(j + 1) * n];
            c[j] = 1.0;
            for k in (0..=j).rev() {
                self.reflect(k, c);
            }
        }
        let mut q = Matrix::zeros(n, p);
        for j in 0..p {
            for i in 0..n {
                q[(i, j)] = cols[j * n + i];
            }
        }
        q
    }
}
