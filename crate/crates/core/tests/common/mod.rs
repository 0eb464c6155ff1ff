//! Shared oracles for the integration tests. Everything here works on plain
//! `Vec<f64>` data with straightforward loops and does not call the library's
//! dense kernels.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ttortho::tt::{Core, TTVector};
use ttortho::Kernel;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random TT-vector with the given modes and interior ranks, entries in [-1, 1].
pub fn random_tt(rng: &mut ChaCha8Rng, modes: &[usize], inner_ranks: &[usize]) -> TTVector {
    assert_eq!(inner_ranks.len() + 1, modes.len());
    let mut ranks = vec![1];
    ranks.extend_from_slice(inner_ranks);
    ranks.push(1);
    let cores = modes
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            let len = ranks[k] * n * ranks[k + 1];
            let data = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
            Core::new(ranks[k], n, ranks[k + 1], data).unwrap()
        })
        .collect();
    TTVector::from_cores(cores).unwrap()
}

/// Random shape with `d` in `ds`, modes in `2..=max_n`, ranks in `1..=max_r`.
pub fn random_shape(rng: &mut ChaCha8Rng, ds: &[usize], max_n: usize, max_r: usize) -> (Vec<usize>, Vec<usize>) {
    let d = ds[rng.gen_range(0..ds.len())];
    let modes = (0..d).map(|_| rng.gen_range(2..=max_n)).collect();
    let ranks = (0..d - 1).map(|_| rng.gen_range(1..=max_r)).collect();
    (modes, ranks)
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

pub fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn scaled(x: &[f64], alpha: f64) -> Vec<f64> {
    x.iter().map(|v| v * alpha).collect()
}

pub fn diff_norm(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Row-major `n x n` matrix product.
pub fn matmul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            for j in 0..n {
                c[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    c
}

/// Kronecker product of row-major square matrices of sizes `p` and `q`.
pub fn kron(a: &[f64], p: usize, b: &[f64], q: usize) -> Vec<f64> {
    let n = p * q;
    let mut out = vec![0.0; n * n];
    for i in 0..p {
        for j in 0..p {
            for k in 0..q {
                for l in 0..q {
                    out[(i * q + k) * n + j * q + l] = a[i * p + j] * b[k * q + l];
                }
            }
        }
    }
    out
}

pub fn eye(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

/// Dense Laplacian as the Kronecker sum of `tridiag(-1, 2, -1)`, with the
/// first mode varying fastest (so mode 1 is the rightmost Kronecker factor).
pub fn dense_laplacian(d: usize, n: usize) -> Vec<f64> {
    let mut t = vec![0.0; n * n];
    for i in 0..n {
        t[i * n + i] = 2.0;
        if i + 1 < n {
            t[i * n + i + 1] = -1.0;
            t[(i + 1) * n + i] = -1.0;
        }
    }
    let size = n.pow(d as u32);
    let mut out = vec![0.0; size * size];
    for k in 0..d {
        // factor order from slowest (mode d) to fastest (mode 1)
        let mut term = vec![1.0];
        let mut dim = 1;
        for mode in (0..d).rev() {
            let f = if mode == k { &t } else { &eye(n) };
            term = kron(&term, dim, f, n);
            dim *= n;
        }
        for (o, v) in out.iter_mut().zip(term) {
            *o += v;
        }
    }
    out
}

/// Symmetric eigenvalues by cyclic Jacobi rotations, sorted descending.
pub fn jacobi_eigenvalues(mut a: Vec<f64>, n: usize) -> Vec<f64> {
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i * n + j].powi(2)).sum();
        let diag: f64 = (0..n).map(|i| a[i * n + i].powi(2)).sum();
        if off <= 1e-30 * diag.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    ev.sort_by(|x, y| y.partial_cmp(x).unwrap());
    ev
}

/// Singular values of a row-major `rows x cols` matrix from the eigenvalues
/// of its Gram matrix.
pub fn singular_values_oracle(a: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut g = vec![0.0; cols * cols];
    for i in 0..cols {
        for j in 0..cols {
            g[i * cols + j] = (0..rows).map(|r| a[r * cols + i] * a[r * cols + j]).sum();
        }
    }
    jacobi_eigenvalues(g, cols).into_iter().map(|v| v.max(0.0).sqrt()).collect()
}

/// Dense QR output: columns of `Q` and `R` as row-major `m x m`, `R(j, i)`
/// at `r[j * m + i]`.
pub struct DenseQr {
    pub q: Vec<Vec<f64>>,
    pub r: Vec<f64>,
}

fn project(source: &[f64], q: &[Vec<f64>], modified: bool) -> (Vec<f64>, Vec<f64>) {
    let mut p = source.to_vec();
    let mut c = Vec::new();
    for qj in q {
        let coef = if modified { dot(&p, qj) } else { dot(source, qj) };
        axpy(&mut p, -coef, qj);
        c.push(coef);
    }
    (p, c)
}

/// Dense counterparts of the six kernels with the library's conventions.
pub fn dense_kernel(kernel: Kernel, a: &[Vec<f64>]) -> DenseQr {
    let m = a.len();
    let mut r = vec![0.0; m * m];
    let mut q: Vec<Vec<f64>> = Vec::new();
    match kernel {
        Kernel::Cgs | Kernel::Mgs | Kernel::Cgs2 | Kernel::Mgs2 => {
            let modified = matches!(kernel, Kernel::Mgs | Kernel::Mgs2);
            let twice = matches!(kernel, Kernel::Cgs2 | Kernel::Mgs2);
            for (i, ai) in a.iter().enumerate() {
                let (mut p, c) = project(ai, &q, modified);
                for (j, v) in c.into_iter().enumerate() {
                    r[j * m + i] = v;
                }
                if twice {
                    let (p2, c2) = project(&p, &q, modified);
                    for (j, v) in c2.into_iter().enumerate() {
                        r[j * m + i] += v;
                    }
                    p = p2;
                }
                let nrm = norm(&p);
                r[i * m + i] = nrm;
                q.push(scaled(&p, 1.0 / nrm));
            }
        }
        Kernel::Gram => {
            // Cholesky G = L L^T, R = L^T, Q = A R^{-1}
            let mut l = vec![0.0; m * m];
            for i in 0..m {
                for j in 0..=i {
                    let mut s = dot(&a[i], &a[j]);
                    for k in 0..j {
                        s -= l[i * m + k] * l[j * m + k];
                    }
                    l[i * m + j] = if i == j { s.sqrt() } else { s / l[j * m + j] };
                }
            }
            for i in 0..m {
                for j in 0..=i {
                    r[j * m + i] = l[i * m + j];
                }
            }
            // columns of A R^{-1} by forward substitution: q_i = (a_i - sum_{j<i} R(j,i) q_j) / R(i,i)
            for i in 0..m {
                let mut p = a[i].clone();
                for (j, qj) in q.iter().enumerate() {
                    axpy(&mut p, -r[j * m + i], qj);
                }
                q.push(scaled(&p, 1.0 / r[i * m + i]));
            }
        }
        Kernel::Householder => {
            let len = a[0].len();
            let mut us: Vec<Option<Vec<f64>>> = Vec::new();
            let reflect = |x: &mut Vec<f64>, u: &[f64]| {
                let c = 2.0 * dot(x, u);
                axpy(x, -c, u);
            };
            for i in 0..m {
                let mut at = a[i].clone();
                for u in us.iter().flatten() {
                    reflect(&mut at, u);
                }
                let mut w = at.clone();
                let mut s = 0.0;
                for j in 0..i {
                    r[j * m + i] = at[j];
                    s += at[j] * at[j];
                    w[j] = 0.0;
                }
                let deficit = (dot(&at, &at) - s).max(0.0);
                let sign = if at[i] < -1e3 * f64::EPSILON * norm(&at) { -1.0 } else { 1.0 };
                let ri = sign * deficit.sqrt();
                r[i * m + i] = ri;
                w[i] -= ri;
                let wn = norm(&w);
                us.push(if wn <= 1e3 * f64::EPSILON * norm(&at) { None } else { Some(scaled(&w, 1.0 / wn)) });
            }
            for i in 0..m {
                let mut e = vec![0.0; len];
                e[i] = 1.0;
                for u in us[..=i].iter().rev().flatten() {
                    reflect(&mut e, u);
                }
                q.push(e);
            }
        }
    }
    DenseQr { q, r }
}

/// `|I - Q^T Q|_2` of dense columns.
pub fn dense_loo(q: &[Vec<f64>]) -> f64 {
    let k = q.len();
    let mut d = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            let g = dot(&q[i], &q[j]);
            d[i * k + j] = if i == j { 1.0 - g } else { -g };
        }
    }
    jacobi_eigenvalues(d, k).iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}
