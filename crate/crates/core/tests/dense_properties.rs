mod common;

use common::{rng, singular_values_oracle};
use proptest::prelude::*;
use rand::Rng;
use ttortho::dense::{cholesky, invert_upper_triangular, qr_factor, svd, DenseMatrix};

fn random_matrix(seed: u64, rows: usize, cols: usize) -> DenseMatrix {
    let mut r = rng(seed);
    DenseMatrix::new(rows, cols, (0..rows * cols).map(|_| r.gen_range(-1.0..1.0)).collect()).unwrap()
}

fn identity_defect(m: &DenseMatrix) -> f64 {
    m.sub(&DenseMatrix::identity(m.rows())).unwrap().norm_2().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn qr_is_orthonormal_and_triangular(seed in any::<u64>(), cols in 1usize..12, extra in 0usize..20) {
        let a = random_matrix(seed, cols + extra, cols);
        let (q, r) = qr_factor(&a).unwrap();
        prop_assert!(identity_defect(&q.transpose().matmul(&q).unwrap()) <= 1e-13);
        prop_assert!(r.is_upper_triangular());
        prop_assert!((0..cols).all(|i| r[(i, i)] >= 0.0));
        let back = q.matmul(&r).unwrap();
        prop_assert!(back.sub(&a).unwrap().frobenius_norm() <= 1e-13 * a.frobenius_norm());
    }

    #[test]
    fn svd_reconstructs_and_matches_eigen_oracle(seed in any::<u64>(), rows in 1usize..64, cols in 1usize..24) {
        let a = random_matrix(seed, rows, cols);
        let s = svd(&a).unwrap();
        let back = s.reconstruct();
        prop_assert!(back.sub(&a).unwrap().frobenius_norm() <= 1e-13 * a.frobenius_norm());
        let oracle = singular_values_oracle(a.data(), rows, cols);
        let top = oracle[0];
        for (got, want) in s.singular_values.iter().zip(&oracle) {
            // eigenvalues of A^T A only resolve singular values to about sqrt(eps) * sigma_max
            prop_assert!((got - want).abs() <= 1e-7 * top);
        }
        prop_assert!(s.singular_values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn cholesky_recovers_factor(seed in any::<u64>(), n in 1usize..16) {
        let mut r = rng(seed);
        let mut l = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..i {
                l[(i, j)] = r.gen_range(-0.5..0.5);
            }
            l[(i, i)] = r.gen_range(1.0..2.0);
        }
        let g = l.matmul(&l.transpose()).unwrap();
        let got = cholesky(&g).unwrap();
        prop_assert!(got.sub(&l).unwrap().frobenius_norm() <= 1e-12 * l.frobenius_norm());
    }

    #[test]
    fn triangular_inverse(seed in any::<u64>(), n in 1usize..16) {
        let mut r = rng(seed);
        let mut u = DenseMatrix::zeros(n, n);
        for i in 0..n {
            u[(i, i)] = r.gen_range(1.0..3.0);
            for j in i + 1..n {
                u[(i, j)] = r.gen_range(-0.3..0.3);
            }
        }
        let inv = invert_upper_triangular(&u).unwrap();
        prop_assert!(inv.is_upper_triangular());
        prop_assert!(identity_defect(&u.matmul(&inv).unwrap()) <= 1e-10);
    }
}

#[test]
fn eigen_oracle_on_known_spectrum() {
    let a = DenseMatrix::from_rows(&[[3.0, 0.0], [0.0, -2.0], [0.0, 0.0]]).unwrap();
    let s = svd(&a).unwrap();
    assert!((s.singular_values[0] - 3.0).abs() < 1e-15);
    assert!((s.singular_values[1] - 2.0).abs() < 1e-15);
    let oracle = singular_values_oracle(a.data(), 3, 2);
    assert_eq!(oracle, vec![3.0, 2.0]);
}
