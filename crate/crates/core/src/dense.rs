//! Dense matrix kernels: Householder QR, one-sided Jacobi SVD, truncation,
//! Cholesky, triangular inversion and the 2-norm condition number.
//!
//! All matrices are stored row-major. The factorizations copy their input
//! into a column-major scratch buffer because every inner loop walks columns.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

const MAX_JACOBI_SWEEPS: usize = 80;
const CHOLESKY_SYMMETRY_TOL: f64 = 1e-12;

/// Row-major dense matrix of `f64`.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    /// Builds a matrix from row-major data, rejecting wrong lengths and
    /// non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} values supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        Ok(Self { rows, cols, data })
    }

    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_raw(rows, cols, vec![0.0; rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in diag.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::Shape(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, data)
    }

    /// Builds a matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns<C: AsRef<[f64]>>(columns: &[C]) -> Result<Self> {
        let rows = columns.first().map_or(0, |c| c.as_ref().len());
        let cols = columns.len();
        let mut data = vec![0.0; rows * cols];
        for (j, c) in columns.iter().enumerate() {
            let c = c.as_ref();
            if c.len() != rows {
                return Err(Error::Shape(format!(
                    "column {j} has {} entries, expected {rows}",
                    c.len()
                )));
            }
            for (i, &v) in c.iter().enumerate() {
                data[i * cols + j] = v;
            }
        }
        Self::new(rows, cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.data[i * self.cols + j]).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        gemm(
            self.rows,
            self.cols,
            other.cols,
            MatRef::row_major(&self.data, self.cols),
            MatRef::row_major(&other.data, other.cols),
            &mut out.data,
        );
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape(format!(
                "cannot subtract {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Self::from_raw(self.rows, self.cols, data))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols.min(i)).all(|j| self.data[i * self.cols + j] == 0.0))
    }

    /// Largest singular value.
    pub fn norm_2(&self) -> Result<f64> {
        if self.rows == 0 || self.cols == 0 {
            return Ok(0.0);
        }
        Ok(svd(self)?.singular_values[0])
    }

    fn to_col_major(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.data.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    fn from_col_major(rows: usize, cols: usize, cm: &[f64]) -> Self {
        let mut out = Self::zeros(rows, cols);
        for j in 0..cols {
            for i in 0..rows {
                out.data[i * cols + j] = cm[j * rows + i];
            }
        }
        out
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            writeln!(f, "  {row:?}")?;
        }
        write!(f, "]")
    }
}

/// Strided read-only view used by [`gemm`].
#[derive(Clone, Copy)]
pub(crate) struct MatRef<'a> {
    data: &'a [f64],
    row_stride: isize,
    col_stride: isize,
}

impl<'a> MatRef<'a> {
    pub(crate) fn row_major(data: &'a [f64], cols: usize) -> Self {
        Self { data, row_stride: cols as isize, col_stride: 1 }
    }

    /// Transposed view of a row-major `rows x cols` buffer.
    pub(crate) fn transposed(data: &'a [f64], cols: usize) -> Self {
        Self { data, row_stride: 1, col_stride: cols as isize }
    }
}

/// `c = a * b` with `a` of shape `m x k`, `b` of shape `k x n` and `c` a
/// row-major `m x n` buffer that is overwritten.
pub(crate) fn gemm(m: usize, k: usize, n: usize, a: MatRef<'_>, b: MatRef<'_>, c: &mut [f64]) {
    assert!(c.len() >= m * n);
    if m == 0 || n == 0 {
        return;
    }
    if k == 0 {
        c[..m * n].fill(0.0);
        return;
    }
    let a_extent = (m - 1) as isize * a.row_stride + (k - 1) as isize * a.col_stride;
    let b_extent = (k - 1) as isize * b.row_stride + (n - 1) as isize * b.col_stride;
    assert!((a_extent as usize) < a.data.len() && (b_extent as usize) < b.data.len());
    // SAFETY: the extents above bound every element dgemm touches.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.data.as_ptr(),
            a.row_stride,
            a.col_stride,
            b.data.as_ptr(),
            b.row_stride,
            b.col_stride,
            0.0,
            c.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}

/// 2-norm with scaling, so entries near the underflow threshold keep their
/// precision when squared.
fn norm2(x: &[f64]) -> f64 {
    let scale = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    scale * x.iter().map(|v| (v / scale) * (v / scale)).sum::<f64>().sqrt()
}

/// `x * 2^e`, split in two factors so that neither over- nor underflows.
fn scale_pow2(x: f64, e: i32) -> f64 {
    let half = e / 2;
    x * 2f64.powi(half) * 2f64.powi(e - half)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Householder QR of a matrix with `rows >= cols`.
///
/// Returns the thin factor `Q` (`rows x cols`) and `R` (`cols x cols`) with a
/// nonnegative diagonal. Rank deficiency shows up as zeros on `diag(R)`.
pub fn qr_factor(a: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    let (m, n) = (a.rows, a.cols);
    if m < n {
        return Err(Error::Shape(format!("QR needs rows >= cols, got {m}x{n}")));
    }
    let (q, r) = householder_qr_col_major(m, n, a.to_col_major());
    Ok((DenseMatrix::from_col_major(m, n, &q), DenseMatrix::from_raw(n, n, r)))
}

/// Column-major Householder QR. Returns the thin `Q` column-major and `R`
/// row-major.
pub(crate) fn householder_qr_col_major(m: usize, n: usize, mut work: Vec<f64>) -> (Vec<f64>, Vec<f64>) {
    let mut reflectors: Vec<Option<Vec<f64>>> = Vec::with_capacity(n);
    let mut r = vec![0.0; n * n];

    for k in 0..n {
        let x = &work[k * m + k..(k + 1) * m];
        let max = x.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
        if max == 0.0 {
            reflectors.push(None);
            for j in k..n {
                r[k * n + j] = work[j * m + k];
            }
            continue;
        }
        // The reflector only depends on the direction of x. A power-of-two
        // scale is exact and lifts subnormal entries to full precision.
        let e = max.log2().floor() as i32;
        let mut v: Vec<f64> = x.iter().map(|&t| scale_pow2(t, -e)).collect();
        let norm_x = norm2(&v);
        // Reflect onto -sign(x0) * |x| e1 so that v0 never cancels.
        let alpha = if v[0] >= 0.0 { -norm_x } else { norm_x };
        v[0] -= alpha;
        let alpha = scale_pow2(alpha, e);
        let norm_v = norm2(&v);
        if norm_v == 0.0 {
            reflectors.push(None);
        } else {
            v.iter_mut().for_each(|t| *t /= norm_v);
            work[k * m + k] = alpha;
            work[k * m + k + 1..(k + 1) * m].fill(0.0);
            for j in k + 1..n {
                let col = &mut work[j * m + k..(j + 1) * m];
                let s = 2.0 * dot(&v, col);
                col.iter_mut().zip(&v).for_each(|(c, vi)| *c -= s * vi);
            }
            reflectors.push(Some(v));
        }
        for j in k..n {
            r[k * n + j] = work[j * m + k];
        }
    }

    let mut q = vec![0.0; m * n];
    for j in 0..n {
        q[j * m + j] = 1.0;
    }
    for (k, v) in reflectors.iter().enumerate().rev() {
        if let Some(v) = v {
            for j in k..n {
                let col = &mut q[j * m + k..(j + 1) * m];
                let s = 2.0 * dot(v, col);
                if s != 0.0 {
                    col.iter_mut().zip(v).for_each(|(c, vi)| *c -= s * vi);
                }
            }
        }
    }

    for k in 0..n {
        if r[k * n + k] < 0.0 {
            r[k * n + k..(k + 1) * n].iter_mut().for_each(|v| *v = -*v);
            q[k * m..(k + 1) * m].iter_mut().for_each(|v| *v = -*v);
        }
    }
    (q, r)
}

/// Thin singular value decomposition `A = U diag(s) Vt`.
#[derive(Clone, Debug)]
pub struct SvdResult {
    pub u: DenseMatrix,
    pub singular_values: Vec<f64>,
    pub vt: DenseMatrix,
}

impl SvdResult {
    pub fn rank(&self) -> usize {
        self.singular_values.len()
    }

    pub fn reconstruct(&self) -> DenseMatrix {
        let mut us = self.u.clone();
        let k = self.rank();
        for i in 0..us.rows {
            for j in 0..k {
                us.data[i * k + j] *= self.singular_values[j];
            }
        }
        us.matmul(&self.vt).expect("consistent SVD factors")
    }
}

/// Thin SVD by the one-sided Jacobi method.
///
/// Tall inputs are first reduced by QR so the rotations act on a square
/// triangle. Each left singular vector is signed so that its first
/// significant entry is nonnegative.
pub fn svd(a: &DenseMatrix) -> Result<SvdResult> {
    let (m, n) = (a.rows, a.cols);
    if m == 0 || n == 0 {
        return Err(Error::Shape(format!("SVD of an empty {m}x{n} matrix")));
    }
    if let Some(pos) = a.data.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(pos));
    }
    if m < n {
        let t = svd_tall(&a.transpose())?;
        // A^T = U S Vt  =>  A = Vt^T S U^T
        let mut out = SvdResult { u: t.vt.transpose(), singular_values: t.singular_values, vt: t.u.transpose() };
        normalize_signs(&mut out);
        return Ok(out);
    }
    let mut out = svd_tall(a)?;
    normalize_signs(&mut out);
    Ok(out)
}

fn svd_tall(a: &DenseMatrix) -> Result<SvdResult> {
    let (m, n) = (a.rows, a.cols);
    if m > n {
        let (q, r) = householder_qr_col_major(m, n, a.to_col_major());
        let (u_r, s, v) = jacobi_col_major(n, n, r_to_col_major(n, &r))?;
        // U = Q * U_r, both column-major: as row-major they are transposes.
        let mut u_t = vec![0.0; n * m];
        gemm(
            n,
            n,
            m,
            MatRef::row_major(&u_r, n),
            MatRef::row_major(&q, m),
            &mut u_t,
        );
        Ok(assemble_svd(m, n, &u_t, s, &v))
    } else {
        let (u, s, v) = jacobi_col_major(m, n, a.to_col_major())?;
        Ok(assemble_svd(m, n, &u, s, &v))
    }
}

fn r_to_col_major(n: usize, r: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            out[j * n + i] = r[i * n + j];
        }
    }
    out
}

/// One-sided Jacobi on a column-major `m x n` matrix, `m >= n`.
/// Returns column-major `U` (`m x n`), singular values and column-major `V`.
fn jacobi_col_major(m: usize, n: usize, mut w: Vec<f64>) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let mut v = vec![0.0; n * n];
    for j in 0..n {
        v[j * n + j] = 1.0;
    }
    let tol = f64::EPSILON * (m as f64).sqrt();
    let mut converged = n == 1;
    let mut residual = 0.0;
    for _ in 0..MAX_JACOBI_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        residual = 0.0_f64;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let (wp, wq) = column_pair(&mut w, m, p, q);
                let alpha = dot(wp, wp);
                let beta = dot(wq, wq);
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma = dot(wp, wq);
                let ratio = gamma.abs() / (alpha.sqrt() * beta.sqrt());
                residual = residual.max(ratio);
                if ratio <= tol {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + zeta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = c * t;
                rotate(wp, wq, c, s);
                let (vp, vq) = column_pair(&mut v, n, p, q);
                rotate(vp, vq, c, s);
            }
        }
        if !rotated {
            converged = true;
        }
    }
    if !converged {
        return Err(Error::ConvergenceFailure { sweeps: MAX_JACOBI_SWEEPS, residual });
    }

    let mut s = vec![0.0; n];
    for j in 0..n {
        let col = &mut w[j * m..(j + 1) * m];
        let norm = norm2(col);
        s[j] = norm;
        if norm > 0.0 {
            col.iter_mut().for_each(|x| *x /= norm);
        }
    }
    complete_zero_columns(&mut w, m, n, &s);
    Ok((w, s, v))
}

fn column_pair(buf: &mut [f64], m: usize, p: usize, q: usize) -> (&mut [f64], &mut [f64]) {
    debug_assert!(p < q);
    let (left, right) = buf.split_at_mut(q * m);
    (&mut left[p * m..(p + 1) * m], &mut right[..m])
}

fn rotate(xp: &mut [f64], xq: &mut [f64], c: f64, s: f64) {
    for (a, b) in xp.iter_mut().zip(xq.iter_mut()) {
        let (x, y) = (*a, *b);
        *a = c * x - s * y;
        *b = s * x + c * y;
    }
}

/// Replaces exactly-zero columns of an orthonormal set by unit vectors
/// orthogonal to all other columns.
fn complete_zero_columns(u: &mut [f64], m: usize, n: usize, s: &[f64]) {
    for j in 0..n {
        if s[j] > 0.0 {
            continue;
        }
        for e in 0..m {
            let mut cand = vec![0.0; m];
            cand[e] = 1.0;
            for _ in 0..2 {
                for k in 0..n {
                    if k == j || (s[k] == 0.0 && k > j) {
                        continue;
                    }
                    let col = &u[k * m..(k + 1) * m];
                    let proj = dot(&cand, col);
                    cand.iter_mut().zip(col).for_each(|(c, x)| *c -= proj * x);
                }
            }
            let norm = norm2(&cand);
            if norm > 0.5 {
                cand.iter_mut().for_each(|x| *x /= norm);
                u[j * m..(j + 1) * m].copy_from_slice(&cand);
                break;
            }
        }
    }
}

fn assemble_svd(m: usize, n: usize, u_cm: &[f64], s: Vec<f64>, v_cm: &[f64]) -> SvdResult {
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]));
    let mut u = DenseMatrix::zeros(m, n);
    let mut vt = DenseMatrix::zeros(n, n);
    let mut sorted = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        sorted.push(s[src]);
        for i in 0..m {
            u.data[i * n + dst] = u_cm[src * m + i];
        }
        vt.data[dst * n..(dst + 1) * n].copy_from_slice(&v_cm[src * n..(src + 1) * n]);
    }
    SvdResult { u, singular_values: sorted, vt }
}

/// Makes the first significant entry of every left singular vector
/// nonnegative, flipping the matching right singular vector.
fn normalize_signs(svd: &mut SvdResult) {
    let (m, k) = (svd.u.rows, svd.u.cols);
    let cutoff = f64::EPSILON.sqrt();
    for j in 0..k {
        let max_abs = (0..m).fold(0.0_f64, |acc, i| acc.max(svd.u.data[i * k + j].abs()));
        let lead = (0..m)
            .map(|i| svd.u.data[i * k + j])
            .find(|x| x.abs() > cutoff * max_abs);
        if matches!(lead, Some(x) if x < 0.0) {
            for i in 0..m {
                svd.u.data[i * k + j] = -svd.u.data[i * k + j];
            }
            let cols = svd.vt.cols;
            svd.vt.data[j * cols..(j + 1) * cols].iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Number of leading singular values kept by [`svd_truncate`].
pub fn truncation_rank(singular_values: &[f64], threshold: f64) -> usize {
    let n = singular_values.len();
    let mut keep = n;
    let mut tail = 0.0;
    for j in (1..n).rev() {
        tail += singular_values[j] * singular_values[j];
        if tail.sqrt() <= threshold {
            keep = j;
        } else {
            break;
        }
    }
    keep.max(1).min(n)
}

/// Keeps the smallest leading rank whose discarded tail has Frobenius norm at
/// most `threshold`, never dropping below rank one.
pub fn svd_truncate(s: SvdResult, threshold: f64) -> Result<SvdResult> {
    if !(threshold >= 0.0) {
        return Err(Error::InvalidArgument(format!("negative truncation threshold {threshold}")));
    }
    let rank = truncation_rank(&s.singular_values, threshold);
    Ok(truncate_to_rank(s, rank))
}

pub(crate) fn truncate_to_rank(s: SvdResult, rank: usize) -> SvdResult {
    let n = s.rank();
    if rank >= n {
        return s;
    }
    let m = s.u.rows;
    let mut u = DenseMatrix::zeros(m, rank);
    for i in 0..m {
        u.data[i * rank..(i + 1) * rank].copy_from_slice(&s.u.data[i * n..i * n + rank]);
    }
    let cols = s.vt.cols;
    let vt = DenseMatrix::from_raw(rank, cols, s.vt.data[..rank * cols].to_vec());
    let mut singular_values = s.singular_values;
    singular_values.truncate(rank);
    SvdResult { u, singular_values, vt }
}

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
///
/// The input is symmetrized as `(G + G^T) / 2` first; asymmetry beyond
/// `1e-12` relative to the largest entry is rejected.
pub fn cholesky(g: &DenseMatrix) -> Result<DenseMatrix> {
    let n = g.rows;
    if g.cols != n {
        return Err(Error::Shape(format!("Cholesky of non-square {}x{}", g.rows, g.cols)));
    }
    let scale = g.max_abs();
    let mut sym = g.clone();
    for i in 0..n {
        for j in 0..i {
            let (a, b) = (g.data[i * n + j], g.data[j * n + i]);
            if (a - b).abs() > CHOLESKY_SYMMETRY_TOL * scale {
                return Err(Error::InvalidArgument(format!(
                    "matrix is not symmetric: entries ({i},{j}) and ({j},{i}) differ by {:e}",
                    (a - b).abs()
                )));
            }
            let mean = 0.5 * (a + b);
            sym.data[i * n + j] = mean;
            sym.data[j * n + i] = mean;
        }
    }

    let mut l = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let row_j = &l.data[j * n..j * n + j];
        let pivot = sym.data[j * n + j] - dot(row_j, row_j);
        if !(pivot > 0.0) {
            return Err(Error::NumericallySingularGram { pivot: j, value: pivot });
        }
        let diag = pivot.sqrt();
        l.data[j * n + j] = diag;
        for i in j + 1..n {
            let s = sym.data[i * n + j] - dot(&l.data[i * n..i * n + j], &l.data[j * n..j * n + j]);
            l.data[i * n + j] = s / diag;
        }
    }
    Ok(l)
}

/// Explicit inverse of an upper-triangular matrix by back substitution.
pub fn invert_upper_triangular(r: &DenseMatrix) -> Result<DenseMatrix> {
    let n = r.rows;
    if r.cols != n {
        return Err(Error::Shape(format!("cannot invert non-square {}x{}", r.rows, r.cols)));
    }
    if !r.is_upper_triangular() {
        return Err(Error::InvalidArgument("matrix is not upper triangular".into()));
    }
    if let Some(j) = (0..n).find(|&j| r.data[j * n + j] == 0.0) {
        return Err(Error::SingularTriangular(j));
    }
    let mut x = DenseMatrix::zeros(n, n);
    for j in 0..n {
        x.data[j * n + j] = 1.0 / r.data[j * n + j];
        for i in (0..j).rev() {
            let s: f64 = (i + 1..=j).map(|k| r.data[i * n + k] * x.data[k * n + j]).sum();
            x.data[i * n + j] = -s / r.data[i * n + i];
        }
    }
    Ok(x)
}

/// `sigma_max / sigma_min`, or `f64::INFINITY` for an exactly singular matrix.
pub fn condition_number_2(a: &DenseMatrix) -> Result<f64> {
    if a.cols == 0 || a.rows < a.cols {
        return Err(Error::Shape(format!(
            "condition number needs rows >= cols >= 1, got {}x{}",
            a.rows, a.cols
        )));
    }
    let s = svd(a)?.singular_values;
    let (max, min) = (s[0], s[s.len() - 1]);
    if min == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(max / min)
}
