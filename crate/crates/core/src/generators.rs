//! Experiment inputs: multi-index maps, canonical basis TT-vectors, the
//! Dirichlet Laplacian in TT format and the rank-one Krylov set.

use crate::error::{Error, Result};
use crate::rounding::{tt_round, RoundingConfig};
use crate::tt::{OperatorCore, TTMatrix, TTVector};

/// Breakdown threshold on the norm of a new Krylov vector.
pub const KRYLOV_BREAKDOWN_NORM: f64 = 1e-300;

/// Bijection between multi-indices and linear indices with the first mode
/// varying fastest. The public `psi`/`phi` pair is 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiIndexMap {
    mode_sizes: Vec<usize>,
    strides: Vec<usize>,
    len: usize,
}

impl MultiIndexMap {
    pub fn new(mode_sizes: &[usize]) -> Result<Self> {
        if mode_sizes.is_empty() || mode_sizes.contains(&0) {
            return Err(Error::Shape(format!("invalid mode sizes {mode_sizes:?}")));
        }
        let mut strides = Vec::with_capacity(mode_sizes.len());
        let mut acc = 1usize;
        for &n in mode_sizes {
            strides.push(acc);
            acc = acc
                .checked_mul(n)
                .ok_or_else(|| Error::Shape(format!("index space of {mode_sizes:?} overflows")))?;
        }
        Ok(Self { mode_sizes: mode_sizes.to_vec(), strides, len: acc })
    }

    pub fn mode_sizes(&self) -> &[usize] {
        &self.mode_sizes
    }

    /// `m_1, .., m_d` with `m_1 = 1`.
    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    /// Size of the index space, the product of the mode sizes.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// 1-based linear index of a 1-based multi-index.
    pub fn psi(&self, index: &[usize]) -> Result<usize> {
        if index.len() != self.mode_sizes.len() {
            return Err(Error::Index(format!(
                "multi-index of length {} for {} modes",
                index.len(),
                self.mode_sizes.len()
            )));
        }
        let mut out = 1;
        for (k, (&i, &n)) in index.iter().zip(&self.mode_sizes).enumerate() {
            if i == 0 || i > n {
                return Err(Error::Index(format!("index {i} in mode {k} outside 1..={n}")));
            }
            out += (i - 1) * self.strides[k];
        }
        Ok(out)
    }

    /// Inverse of [`psi`](Self::psi).
    pub fn phi(&self, i: usize) -> Result<Vec<usize>> {
        if i == 0 || i > self.len {
            return Err(Error::Index(format!("linear index {i} outside 1..={}", self.len)));
        }
        Ok(self.unravel(i - 1).into_iter().map(|v| v + 1).collect())
    }

    /// Zero-based multi-index of a zero-based linear index.
    pub fn unravel(&self, mut i: usize) -> Vec<usize> {
        self.mode_sizes
            .iter()
            .map(|&n| {
                let v = i % n;
                i /= n;
                v
            })
            .collect()
    }
}

/// The rank-one tensor `e_{i_1} ⊗ .. ⊗ e_{i_d}` with `(i_1, .., i_d) = phi(i)`.
pub fn canonical_tt(map: &MultiIndexMap, i: usize) -> Result<TTVector> {
    let index = map.phi(i)?;
    let factors: Vec<Vec<f64>> = index
        .iter()
        .zip(map.mode_sizes())
        .map(|(&ik, &n)| {
            let mut v = vec![0.0; n];
            v[ik - 1] = 1.0;
            v
        })
        .collect();
    TTVector::rank_one(&factors)
}

/// The first `m` canonical basis vectors.
pub fn canonical_basis(map: &MultiIndexMap, m: usize) -> Result<Vec<TTVector>> {
    (1..=m).map(|i| canonical_tt(map, i)).collect()
}

/// The all-ones tensor of order `d` and mode size `n`.
pub fn ones_tt(d: usize, n: usize) -> Result<TTVector> {
    if d == 0 || n == 0 {
        return Err(Error::InvalidArgument(format!("ones tensor needs d, n >= 1, got d={d}, n={n}")));
    }
    TTVector::rank_one(&vec![vec![1.0; n]; d])
}

fn tridiagonal(n: usize) -> Vec<f64> {
    let mut t = vec![0.0; n * n];
    for i in 0..n {
        t[i * n + i] = 2.0;
        if i + 1 < n {
            t[i * n + i + 1] = -1.0;
            t[(i + 1) * n + i] = -1.0;
        }
    }
    t
}

/// Discrete Laplacian with Dirichlet boundary conditions and unit grid
/// spacing: the Kronecker sum of `d` copies of `tridiag(-1, 2, -1)`.
/// Operator ranks are 2 in the interior.
pub fn laplacian_tt(d: usize, n: usize) -> Result<TTMatrix> {
    if d == 0 || n < 2 {
        return Err(Error::InvalidArgument(format!("Laplacian needs d >= 1 and n >= 2, got d={d}, n={n}")));
    }
    let t = tridiagonal(n);
    let mut eye = vec![0.0; n * n];
    for i in 0..n {
        eye[i * n + i] = 1.0;
    }
    if d == 1 {
        return TTMatrix::from_cores(vec![OperatorCore::new(1, n, n, 1, t)?]);
    }
    // blocks[(a, b)] gives the n x n slice at rank pair (a, b)
    let build = |left: usize, right: usize, blocks: &[(usize, usize, &[f64])]| -> Result<OperatorCore> {
        let mut data = vec![0.0; left * n * n * right];
        for &(a, b, block) in blocks {
            for i in 0..n {
                for j in 0..n {
                    data[((a * n + i) * n + j) * right + b] = block[i * n + j];
                }
            }
        }
        OperatorCore::new(left, n, n, right, data)
    };
    let mut cores = Vec::with_capacity(d);
    cores.push(build(1, 2, &[(0, 0, &t), (0, 1, &eye)])?);
    for _ in 1..d - 1 {
        cores.push(build(2, 2, &[(0, 0, &eye), (1, 0, &t), (1, 1, &eye)])?);
    }
    cores.push(build(2, 1, &[(0, 0, &eye), (1, 0, &t)])?);
    TTMatrix::from_cores(cores)
}

/// Parameters of the Krylov input set.
#[derive(Clone, Debug)]
pub struct KrylovSetSpec {
    pub order: usize,
    pub mode_size: usize,
    pub count: usize,
    /// The iteration operator, `-Δ_d` by default.
    pub operator: TTMatrix,
}

impl KrylovSetSpec {
    pub fn new(order: usize, mode_size: usize, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidArgument("Krylov set needs at least one vector".into()));
        }
        let operator = laplacian_tt(order, mode_size)?.scale(-1.0);
        Ok(Self { order, mode_size, count, operator })
    }
}

/// One Krylov vector with the storage of its pre-truncation form.
#[derive(Clone, Debug)]
pub struct KrylovStep {
    pub vector: TTVector,
    /// Storage count of `x_j` before rank-one truncation (equal to the
    /// vector's own storage for the first, untruncated vector).
    pub storage_before: usize,
}

/// `a_1 = ones / |ones|`, then `a_{j+1} = normalize(round(A a_j, rank 1))`.
pub fn krylov_set(spec: &KrylovSetSpec) -> Result<Vec<TTVector>> {
    Ok(krylov_set_traced(spec)?.into_iter().map(|s| s.vector).collect())
}

pub fn krylov_set_traced(spec: &KrylovSetSpec) -> Result<Vec<KrylovStep>> {
    let op = &spec.operator;
    if spec.count == 0 {
        return Err(Error::InvalidArgument("Krylov set needs at least one vector".into()));
    }
    if op.order() != spec.order
        || op.row_sizes() != op.col_sizes()
        || op.col_sizes().iter().any(|&c| c != spec.mode_size)
    {
        return Err(Error::Shape("Krylov operator does not match the requested shape".into()));
    }
    let ones = ones_tt(spec.order, spec.mode_size)?;
    let first = ones.scale(1.0 / ones.norm());
    let rank_one = RoundingConfig::max_rank(1)?;
    let mut out = vec![KrylovStep { storage_before: first.storage_count(), vector: first }];
    for step in 2..=spec.count {
        let x = op.apply(&out.last().expect("nonempty").vector)?;
        let norm = x.norm();
        if !(norm > KRYLOV_BREAKDOWN_NORM) {
            return Err(Error::KrylovBreakdown { step, norm });
        }
        let a = tt_round(&x, &rank_one)?;
        let a_norm = a.norm();
        if !(a_norm > KRYLOV_BREAKDOWN_NORM) {
            return Err(Error::KrylovBreakdown { step, norm: a_norm });
        }
        out.push(KrylovStep { storage_before: x.storage_count(), vector: a.scale(1.0 / a_norm) });
    }
    Ok(out)
}
