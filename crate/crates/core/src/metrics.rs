//! Orthogonality and memory metrics.

use crate::dense::{condition_number_2, svd, DenseMatrix};
use crate::error::{Error, Result};
use crate::ortho::{Kernel, OrthoResult};
use crate::tt::TTVector;

/// Unit round-off of IEEE-754 double precision, `2^-53`.
pub const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

/// Gram matrix `Q^T Q` from TT inner products.
pub fn gram_of(q: &[TTVector]) -> Result<DenseMatrix> {
    let k = q.len();
    let mut g = DenseMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..=i {
            let v = q[i].inner_product(&q[j])?;
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    Ok(g)
}

/// `|I - G|_2` for the leading `k x k` block of a Gram matrix.
fn defect_norm(g: &DenseMatrix, k: usize) -> Result<f64> {
    let mut d = DenseMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            let sym = 0.5 * (g[(i, j)] + g[(j, i)]);
            d[(i, j)] = if i == j { 1.0 - sym } else { -sym };
        }
    }
    if d.max_abs() == 0.0 {
        return Ok(0.0);
    }
    Ok(svd(&d)?.singular_values[0])
}

/// `|I_k - Q_k^T Q_k|_2`.
pub fn loss_of_orthogonality(q: &[TTVector]) -> Result<f64> {
    if q.is_empty() {
        return Err(Error::InvalidArgument("loss of orthogonality of an empty set".into()));
    }
    defect_norm(&gram_of(q)?, q.len())
}

/// Loss of orthogonality of every prefix `q_1..q_k`, `k = 1..=len`.
pub fn loss_of_orthogonality_prefixes(q: &[TTVector]) -> Result<Vec<f64>> {
    let g = gram_of(q)?;
    (1..=q.len()).map(|k| defect_norm(&g, k)).collect()
}

/// Stored floats divided by the dense size.
pub fn compression_ratio(x: &TTVector) -> f64 {
    x.storage_count() as f64 / x.dense_len() as f64
}

/// Storage before rounding over storage after.
pub fn compression_gain(before: &TTVector, after: &TTVector) -> Result<f64> {
    if before.mode_sizes() != after.mode_sizes() {
        return Err(Error::Shape(format!(
            "mode sizes {:?} and {:?} differ",
            before.mode_sizes(),
            after.mode_sizes()
        )));
    }
    Ok(before.storage_count() as f64 / after.storage_count() as f64)
}

/// Densified input matrix `A_k = [a_1 .. a_k]`.
pub fn dense_columns(a: &[TTVector]) -> Result<DenseMatrix> {
    let cols = a.iter().map(TTVector::densify).collect::<Result<Vec<_>>>()?;
    DenseMatrix::from_columns(&cols)
}

/// `(kappa, kappa^2)` of the densified set.
pub fn condition_track(a: &[TTVector]) -> Result<(f64, f64)> {
    let kappa = condition_number_2(&dense_columns(a)?)?;
    Ok((kappa, kappa * kappa))
}

/// `condition_track` for every prefix of `a`.
pub fn condition_track_prefixes(a: &[TTVector]) -> Result<Vec<(f64, f64)>> {
    let full = dense_columns(a)?;
    let rows = full.rows();
    (1..=a.len())
        .map(|k| {
            let mut sub = DenseMatrix::zeros(rows, k);
            for i in 0..rows {
                for j in 0..k {
                    sub[(i, j)] = full[(i, j)];
                }
            }
            let kappa = condition_number_2(&sub)?;
            Ok((kappa, kappa * kappa))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricRecord {
    pub k: usize,
    pub loo: f64,
    pub max_rank: usize,
    pub storage_count: usize,
    pub compression_ratio: f64,
    pub compression_gain: f64,
    pub kappa: Option<f64>,
    pub kappa_sq: Option<f64>,
    pub rounding_calls: usize,
}

/// Per-basis-size metrics of one kernel run.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricSeries {
    pub kernel: Kernel,
    pub delta: f64,
    pub records: Vec<MetricRecord>,
}

impl MetricSeries {
    /// Builds the series from a (possibly partial) run. `kappas`, when
    /// given, holds `(kappa, kappa^2)` of the input prefixes.
    pub fn from_result(result: &OrthoResult, delta: f64, kappas: Option<&[(f64, f64)]>) -> Result<Self> {
        let loo = if result.q.is_empty() { Vec::new() } else { loss_of_orthogonality_prefixes(&result.q)? };
        let records = result
            .steps
            .iter()
            .zip(loo)
            .map(|(s, loo)| {
                let kappa = kappas.and_then(|ks| ks.get(s.k - 1)).copied();
                MetricRecord {
                    k: s.k,
                    loo,
                    max_rank: s.max_rank,
                    storage_count: s.storage_after,
                    compression_ratio: s.compression_ratio,
                    compression_gain: s.compression_gain(),
                    kappa: kappa.map(|k| k.0),
                    kappa_sq: kappa.map(|k| k.1),
                    rounding_calls: s.rounding_calls,
                }
            })
            .collect();
        Ok(Self { kernel: result.kernel, delta, records })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{canonical_basis, MultiIndexMap};
    use crate::tt::Core;

    fn basis(n: usize, m: usize) -> Vec<TTVector> {
        canonical_basis(&MultiIndexMap::new(&[n, n, n]).unwrap(), m).unwrap()
    }

    #[test]
    fn loo_examples() {
        let e = basis(4, 5);
        assert_eq!(loss_of_orthogonality(&e).unwrap(), 0.0);
        let h = 1.0 / 2f64.sqrt();
        let q2 = e[0].add(&e[1]).unwrap().scale(h);
        let loo = loss_of_orthogonality(&[e[0].clone(), q2]).unwrap();
        assert!((loo - h).abs() < 1e-15);
        let single = e[2].scale(1.0 + 1e-15);
        assert!(loss_of_orthogonality(&[single]).unwrap() <= 1e-14);
        assert!(loss_of_orthogonality(&[]).is_err());
    }

    #[test]
    fn compression_examples() {
        let ones6 = TTVector::rank_one(&vec![vec![1.0; 15]; 6]).unwrap();
        assert!((compression_ratio(&ones6) - 90.0 / 11_390_625.0).abs() < 1e-18);
        let one_d = TTVector::rank_one(&[vec![1.0, 2.0, 3.0]]).unwrap();
        assert_eq!(compression_ratio(&one_d), 1.0);
        let cores = vec![Core::zeros(1, 4, 2), Core::zeros(2, 4, 2), Core::zeros(2, 4, 1)];
        assert_eq!(compression_ratio(&TTVector::from_cores(cores).unwrap()), 0.5);
    }

    #[test]
    fn gain_examples() {
        let ones6 = TTVector::rank_one(&vec![vec![1.0; 15]; 6]).unwrap();
        assert_eq!(compression_gain(&ones6, &ones6).unwrap(), 1.0);
        let doubled = ones6.add(&ones6).unwrap();
        assert_eq!(doubled.storage_count(), 300);
        assert!((compression_gain(&doubled, &ones6).unwrap() - 10.0 / 3.0).abs() < 1e-15);
        let other = TTVector::rank_one(&vec![vec![1.0; 14]; 6]).unwrap();
        assert!(compression_gain(&ones6, &other).is_err());
    }

    #[test]
    fn condition_examples() {
        let e = basis(3, 4);
        assert!((condition_track(&e).unwrap().0 - 1.0).abs() < 1e-14);
        let t = 1.0 / (1.0 + 1e-6f64).sqrt();
        let near = e[0].scale(t).add(&e[1].scale(1e-3 * t)).unwrap();
        let (kappa, kappa_sq) = condition_track(&[e[0].clone(), near]).unwrap();
        assert!(kappa >= 1e2);
        assert_eq!(kappa_sq, kappa * kappa);
    }

    #[test]
    fn unit_roundoff_value() {
        assert_eq!(UNIT_ROUNDOFF, 2f64.powi(-53));
    }
}
