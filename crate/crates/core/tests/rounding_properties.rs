mod common;

use common::{diff_norm, norm, random_shape, random_tt, rng};
use proptest::prelude::*;
use ttortho::rounding::{tt_round, RoundingConfig};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn error_within_delta(seed in any::<u64>(), exp in prop::sample::select(vec![2i32, 4, 8])) {
        let delta = 10f64.powi(-exp);
        let mut r = rng(seed);
        let (modes, ranks) = random_shape(&mut r, &[2, 3, 4], 6, 4);
        // a sum of two tensors has redundant ranks worth truncating
        let x = random_tt(&mut r, &modes, &ranks).add(&random_tt(&mut r, &modes, &ranks).scale(1e-3)).unwrap();
        let y = tt_round(&x, &RoundingConfig::accuracy(delta).unwrap()).unwrap();
        // The raw inner product of a difference cancels down to about
        // sqrt(eps) |x|; an orthogonalized copy gives the norm accurately.
        let diff = tt_round(&x.axpy(-1.0, &y).unwrap(), &RoundingConfig::accuracy(1e-15).unwrap()).unwrap();
        prop_assert!(diff.norm() <= delta * x.norm() * (1.0 + 1e-10));
        let (xd, yd) = (x.densify().unwrap(), y.densify().unwrap());
        prop_assert!(diff_norm(&xd, &yd) <= delta * norm(&xd) * (1.0 + 1e-10));
    }

    #[test]
    fn ranks_never_grow(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (modes, ranks) = random_shape(&mut r, &[2, 3, 4], 6, 5);
        let x = random_tt(&mut r, &modes, &ranks);
        let y = tt_round(&x, &RoundingConfig::accuracy(1e-6).unwrap()).unwrap();
        for (a, b) in y.ranks().iter().zip(x.ranks()) {
            prop_assert!(*a <= b);
        }
    }

    #[test]
    fn idempotent_up_to_delta(seed in any::<u64>()) {
        let delta = 1e-3;
        let cfg = RoundingConfig::accuracy(delta).unwrap();
        let mut r = rng(seed);
        let (modes, ranks) = random_shape(&mut r, &[2, 3, 4], 6, 4);
        let x = random_tt(&mut r, &modes, &ranks);
        let y = tt_round(&x, &cfg).unwrap();
        let z = tt_round(&y, &cfg).unwrap();
        prop_assert_eq!(z.ranks(), y.ranks());
        prop_assert!(z.axpy(-1.0, &y).unwrap().norm() <= delta * y.norm());
    }

    #[test]
    fn max_rank_one(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (modes, ranks) = random_shape(&mut r, &[1, 2, 3, 4], 6, 4);
        let x = random_tt(&mut r, &modes, &ranks);
        let y = tt_round(&x, &RoundingConfig::max_rank(1).unwrap()).unwrap();
        prop_assert!(y.ranks().iter().all(|&k| k == 1));
    }
}
