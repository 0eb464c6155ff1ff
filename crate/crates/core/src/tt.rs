//! Tensor-Train vectors and operators.
//!
//! A TT-vector of order `d` stores one order-3 core per mode. Core `k` has
//! shape `(r_{k-1}, n_k, r_k)` with the last index fastest, and the boundary
//! ranks are always `r_0 = r_d = 1`. Entry `x(i_1, .., i_d)` is the product
//! of the slices `X_1(i_1) X_2(i_2) .. X_d(i_d)`.
//!
//! Dense vectors produced by [`TTVector::densify`] are ordered with the first
//! mode index varying fastest.

use crate::dense::{gemm, DenseMatrix, MatRef};
use crate::error::{Error, Result};

/// Default cap on the number of entries [`TTVector::densify`] will produce.
pub const DEFAULT_DENSIFY_CAP: usize = 10_000_000;

/// One order-3 TT-core with layout `(left, mode, right)`, right index fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct Core {
    left: usize,
    mode: usize,
    right: usize,
    data: Vec<f64>,
}

impl Core {
    pub fn new(left: usize, mode: usize, right: usize, data: Vec<f64>) -> Result<Self> {
        if left == 0 || mode == 0 || right == 0 {
            return Err(Error::Shape(format!("core dimensions must be positive, got ({left}, {mode}, {right})")));
        }
        if data.len() != left * mode * right {
            return Err(Error::Shape(format!(
                "core ({left}, {mode}, {right}) needs {} values, got {}",
                left * mode * right,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        Ok(Self { left, mode, right, data })
    }

    pub(crate) fn from_raw(left: usize, mode: usize, right: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), left * mode * right);
        Self { left, mode, right, data }
    }

    pub fn zeros(left: usize, mode: usize, right: usize) -> Self {
        Self::from_raw(left, mode, right, vec![0.0; left * mode * right])
    }

    pub fn left(&self) -> usize {
        self.left
    }

    pub fn mode(&self) -> usize {
        self.mode
    }

    pub fn right(&self) -> usize {
        self.right
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, a: usize, i: usize, b: usize) -> f64 {
        self.data[(a * self.mode + i) * self.right + b]
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Slice `X(i)` as a row-major `left x right` matrix.
    pub fn slice(&self, i: usize) -> DenseMatrix {
        let mut out = Vec::with_capacity(self.left * self.right);
        for a in 0..self.left {
            let start = (a * self.mode + i) * self.right;
            out.extend_from_slice(&self.data[start..start + self.right]);
        }
        DenseMatrix::from_raw(self.left, self.right, out)
    }
}

/// A tensor of order `d` in TT format.
#[derive(Clone, Debug, PartialEq)]
pub struct TTVector {
    cores: Vec<Core>,
}

impl TTVector {
    /// Validates chain compatibility and the unit boundary ranks.
    pub fn from_cores(cores: Vec<Core>) -> Result<Self> {
        if cores.is_empty() {
            return Err(Error::Shape("a TT-vector needs at least one core".into()));
        }
        if cores[0].left != 1 || cores[cores.len() - 1].right != 1 {
            return Err(Error::Shape("boundary TT-ranks must be 1".into()));
        }
        for (k, pair) in cores.windows(2).enumerate() {
            if pair[0].right != pair[1].left {
                return Err(Error::Shape(format!(
                    "core {k} has right rank {} but core {} has left rank {}",
                    pair[0].right,
                    k + 1,
                    pair[1].left
                )));
            }
        }
        Ok(Self { cores })
    }

    pub(crate) fn from_cores_unchecked(cores: Vec<Core>) -> Self {
        debug_assert!(Self::from_cores(cores.clone()).is_ok());
        Self { cores }
    }

    /// Rank-1 tensor whose cores are the given mode vectors: `v_1 ⊗ .. ⊗ v_d`.
    pub fn rank_one(factors: &[Vec<f64>]) -> Result<Self> {
        let cores = factors
            .iter()
            .map(|f| Core::new(1, f.len(), 1, f.clone()))
            .collect::<Result<Vec<_>>>()?;
        Self::from_cores(cores)
    }

    /// The zero tensor with all ranks 1.
    pub fn zeros(mode_sizes: &[usize]) -> Result<Self> {
        if mode_sizes.is_empty() || mode_sizes.contains(&0) {
            return Err(Error::Shape(format!("invalid mode sizes {mode_sizes:?}")));
        }
        Ok(Self { cores: mode_sizes.iter().map(|&n| Core::zeros(1, n, 1)).collect() })
    }

    pub fn order(&self) -> usize {
        self.cores.len()
    }

    pub fn cores(&self) -> &[Core] {
        &self.cores
    }

    pub(crate) fn into_cores(self) -> Vec<Core> {
        self.cores
    }

    pub fn mode_sizes(&self) -> Vec<usize> {
        self.cores.iter().map(|c| c.mode).collect()
    }

    /// `r_0, .., r_d`.
    pub fn ranks(&self) -> Vec<usize> {
        std::iter::once(1).chain(self.cores.iter().map(|c| c.right)).collect()
    }

    pub fn max_rank(&self) -> usize {
        self.cores.iter().map(|c| c.right).max().unwrap_or(1)
    }

    /// Number of stored floats, `sum_k r_{k-1} n_k r_k`.
    pub fn storage_count(&self) -> usize {
        self.cores.iter().map(Core::len).sum()
    }

    /// Product of the mode sizes, saturating at `u128::MAX`.
    pub fn dense_len(&self) -> u128 {
        self.cores.iter().fold(1u128, |acc, c| acc.saturating_mul(c.mode as u128))
    }

    fn check_same_modes(&self, other: &Self) -> Result<()> {
        if self.order() != other.order() || self.cores.iter().zip(&other.cores).any(|(a, b)| a.mode != b.mode) {
            return Err(Error::Shape(format!(
                "mode sizes {:?} and {:?} differ",
                self.mode_sizes(),
                other.mode_sizes()
            )));
        }
        Ok(())
    }

    /// Entry at a zero-based multi-index.
    pub fn element(&self, index: &[usize]) -> Result<f64> {
        if index.len() != self.order() {
            return Err(Error::Index(format!(
                "multi-index of length {} for an order-{} tensor",
                index.len(),
                self.order()
            )));
        }
        let mut row = vec![1.0];
        for (k, (core, &i)) in self.cores.iter().zip(index).enumerate() {
            if i >= core.mode {
                return Err(Error::Index(format!("index {i} in mode {k} of size {}", core.mode)));
            }
            let mut next = vec![0.0; core.right];
            for (a, &w) in row.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                let start = (a * core.mode + i) * core.right;
                for (n, &c) in next.iter_mut().zip(&core.data[start..start + core.right]) {
                    *n += w * c;
                }
            }
            row = next;
        }
        Ok(row[0])
    }

    /// Sum of two TT-vectors. Interior ranks add; boundary ranks stay 1.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_modes(other)?;
        let d = self.order();
        if d == 1 {
            let data = self.cores[0].data.iter().zip(&other.cores[0].data).map(|(a, b)| a + b).collect();
            return Ok(Self { cores: vec![Core::from_raw(1, self.cores[0].mode, 1, data)] });
        }
        let mut cores = Vec::with_capacity(d);
        for k in 0..d {
            let (x, y) = (&self.cores[k], &other.cores[k]);
            let n = x.mode;
            let left = if k == 0 { 1 } else { x.left + y.left };
            let right = if k == d - 1 { 1 } else { x.right + y.right };
            let mut out = Core::zeros(left, n, right);
            let (y_row, y_col) = (if k == 0 { 0 } else { x.left }, if k == d - 1 { 0 } else { x.right });
            for (src, row_off, col_off) in [(x, 0, 0), (y, y_row, y_col)] {
                for a in 0..src.left {
                    for i in 0..n {
                        let s = (a * n + i) * src.right;
                        let t = ((a + row_off) * n + i) * right + col_off;
                        out.data[t..t + src.right].copy_from_slice(&src.data[s..s + src.right]);
                    }
                }
            }
            cores.push(out);
        }
        Ok(Self { cores })
    }

    /// `alpha * x`, applied to the first core only.
    pub fn scale(&self, alpha: f64) -> Self {
        let mut out = self.clone();
        out.cores[0].data.iter_mut().for_each(|v| *v *= alpha);
        out
    }

    /// `self + alpha * other`.
    pub fn axpy(&self, alpha: f64, other: &Self) -> Result<Self> {
        self.add(&other.scale(alpha))
    }

    /// Euclidean inner product by left-to-right contraction of paired cores.
    pub fn inner_product(&self, other: &Self) -> Result<f64> {
        self.check_same_modes(other)?;
        // env is r_x x r_y, row-major
        let mut env = vec![1.0];
        let mut scratch = Vec::new();
        for (x, y) in self.cores.iter().zip(&other.cores) {
            let n = x.mode;
            // w = env^T * X  viewed as (r_y) x (n * r'_x)
            scratch.resize(y.left * n * x.right, 0.0);
            gemm(
                y.left,
                x.left,
                n * x.right,
                MatRef::transposed(&env, y.left),
                MatRef::row_major(&x.data, n * x.right),
                &mut scratch,
            );
            // env' = w^T * Y with w as (r_y n) x r'_x and Y as (r_y n) x r'_y
            let mut next = vec![0.0; x.right * y.right];
            gemm(
                x.right,
                y.left * n,
                y.right,
                MatRef::transposed(&scratch, x.right),
                MatRef::row_major(&y.data, y.right),
                &mut next,
            );
            env = next;
        }
        Ok(env[0])
    }

    pub fn norm(&self) -> f64 {
        self.inner_product(self).expect("same shape").max(0.0).sqrt()
    }

    /// Dense vector of all entries, first mode fastest.
    pub fn densify(&self) -> Result<Vec<f64>> {
        self.densify_with_cap(DEFAULT_DENSIFY_CAP)
    }

    pub fn densify_with_cap(&self, cap: usize) -> Result<Vec<f64>> {
        let total = self.dense_len();
        if total > cap as u128 {
            return Err(Error::TooLargeToDensify { elements: total, cap });
        }
        // partial is (prod n_1..n_k) x r_k, row index with mode 1 fastest
        let mut partial = vec![1.0];
        let mut rows = 1usize;
        for core in &self.cores {
            let (r_in, n, r_out) = (core.left, core.mode, core.right);
            let mut next = vec![0.0; rows * n * r_out];
            for i in 0..n {
                // slice X(i) is r_in x r_out with row stride n * r_out
                let slice = MatRef::row_major(&core.data[i * r_out..], n * r_out);
                gemm(
                    rows,
                    r_in,
                    r_out,
                    MatRef::row_major(&partial, r_in),
                    slice,
                    &mut next[i * rows * r_out..(i + 1) * rows * r_out],
                );
            }
            partial = next;
            rows *= n;
        }
        Ok(partial)
    }

    pub fn is_finite(&self) -> bool {
        self.cores.iter().all(|c| c.data.iter().all(|v| v.is_finite()))
    }
}

/// Core of a TT-operator with layout `(left, row, col, right)`, right fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorCore {
    left: usize,
    rows: usize,
    cols: usize,
    right: usize,
    data: Vec<f64>,
}

impl OperatorCore {
    pub fn new(left: usize, rows: usize, cols: usize, right: usize, data: Vec<f64>) -> Result<Self> {
        if left == 0 || rows == 0 || cols == 0 || right == 0 {
            return Err(Error::Shape("operator core dimensions must be positive".into()));
        }
        if data.len() != left * rows * cols * right {
            return Err(Error::Shape(format!(
                "operator core ({left}, {rows}, {cols}, {right}) needs {} values, got {}",
                left * rows * cols * right,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        Ok(Self { left, rows, cols, right, data })
    }

    pub fn left(&self) -> usize {
        self.left
    }

    pub fn right(&self) -> usize {
        self.right
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, a: usize, i: usize, j: usize, b: usize) -> f64 {
        self.data[((a * self.rows + i) * self.cols + j) * self.right + b]
    }
}

/// Linear operator in TT format (a TT-matrix).
#[derive(Clone, Debug, PartialEq)]
pub struct TTMatrix {
    cores: Vec<OperatorCore>,
}

impl TTMatrix {
    pub fn from_cores(cores: Vec<OperatorCore>) -> Result<Self> {
        if cores.is_empty() {
            return Err(Error::Shape("a TT-matrix needs at least one core".into()));
        }
        if cores[0].left != 1 || cores[cores.len() - 1].right != 1 {
            return Err(Error::Shape("boundary operator ranks must be 1".into()));
        }
        if cores.windows(2).any(|p| p[0].right != p[1].left) {
            return Err(Error::Shape("operator cores do not chain".into()));
        }
        Ok(Self { cores })
    }

    pub fn order(&self) -> usize {
        self.cores.len()
    }

    pub fn cores(&self) -> &[OperatorCore] {
        &self.cores
    }

    pub fn ranks(&self) -> Vec<usize> {
        std::iter::once(1).chain(self.cores.iter().map(|c| c.right)).collect()
    }

    pub fn row_sizes(&self) -> Vec<usize> {
        self.cores.iter().map(|c| c.rows).collect()
    }

    pub fn col_sizes(&self) -> Vec<usize> {
        self.cores.iter().map(|c| c.cols).collect()
    }

    /// `alpha * A`, applied to the first core.
    pub fn scale(&self, alpha: f64) -> Self {
        let mut out = self.clone();
        out.cores[0].data.iter_mut().for_each(|v| *v *= alpha);
        out
    }

    /// Matrix-vector product; result rank `k` is `R_k * r_k`.
    pub fn apply(&self, x: &TTVector) -> Result<TTVector> {
        if self.order() != x.order() || self.cores.iter().zip(x.cores()).any(|(a, c)| a.cols != c.mode) {
            return Err(Error::Shape(format!(
                "operator with column modes {:?} applied to a tensor with modes {:?}",
                self.col_sizes(),
                x.mode_sizes()
            )));
        }
        let mut cores = Vec::with_capacity(self.order());
        for (a, xc) in self.cores.iter().zip(x.cores()) {
            let (ra, rb) = (a.left, a.right);
            let (sa, sb) = (xc.left, xc.right);
            let (n_out, n_in) = (a.rows, a.cols);
            let left = ra * sa;
            let right = rb * sb;
            let mut out = Core::zeros(left, n_out, right);
            for alpha in 0..ra {
                for i in 0..n_out {
                    for j in 0..n_in {
                        for alpha2 in 0..rb {
                            let coeff = a.get(alpha, i, j, alpha2);
                            if coeff == 0.0 {
                                continue;
                            }
                            for beta in 0..sa {
                                let src = (beta * n_in + j) * sb;
                                let dst = ((alpha * sa + beta) * n_out + i) * right + alpha2 * sb;
                                for (o, &v) in out.data[dst..dst + sb].iter_mut().zip(&xc.data()[src..src + sb]) {
                                    *o += coeff * v;
                                }
                            }
                        }
                    }
                }
            }
            cores.push(out);
        }
        Ok(TTVector::from_cores_unchecked(cores))
    }

    /// Dense matrix with rows and columns ordered first-mode-fastest.
    pub fn to_dense(&self) -> Result<DenseMatrix> {
        let rows: u128 = self.cores.iter().map(|c| c.rows as u128).product();
        let cols: u128 = self.cores.iter().map(|c| c.cols as u128).product();
        let total = rows.saturating_mul(cols);
        if total > DEFAULT_DENSIFY_CAP as u128 {
            return Err(Error::TooLargeToDensify { elements: total, cap: DEFAULT_DENSIFY_CAP });
        }
        let (rows, cols) = (rows as usize, cols as usize);
        let mut out = DenseMatrix::zeros(rows, cols);
        let (row_map, col_map) = (
            crate::generators::MultiIndexMap::new(&self.row_sizes())?,
            crate::generators::MultiIndexMap::new(&self.col_sizes())?,
        );
        for r in 0..rows {
            let ri = row_map.unravel(r);
            for c in 0..cols {
                let ci = col_map.unravel(c);
                let mut vec = vec![1.0];
                for (k, core) in self.cores.iter().enumerate() {
                    let mut next = vec![0.0; core.right];
                    for (a, &w) in vec.iter().enumerate() {
                        for (b, nb) in next.iter_mut().enumerate() {
                            *nb += w * core.get(a, ri[k], ci[k], b);
                        }
                    }
                    vec = next;
                }
                out[(r, c)] = vec[0];
            }
        }
        Ok(out)
    }
}
