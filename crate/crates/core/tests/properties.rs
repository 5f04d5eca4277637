mod common;

use common::*;
use gzk_core::field::{forward, inverse};
use gzk_core::grid::make_grid;
use gzk_core::group::propagate;
use gzk_core::norms::{mixed_norm, AxisSet, Exponent, MixedNormSpec, Trajectory};
use num_complex::Complex64;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transform_roundtrip_any_box(seed in 0u64..1 << 20, lx in 1.0f64..60.0, ly in 1.0f64..60.0) {
        let g = make_grid(16, 16, lx, ly).unwrap();
        let mut r = rng(seed);
        let f = random_complex_field(&g, &mut r);
        let back = inverse(&forward(&f).unwrap()).unwrap();
        prop_assert!(rel_l2(&back, &f) < 1e-12);
    }

    #[test]
    fn plancherel_any_box(seed in 0u64..1 << 20, lx in 1.0f64..60.0, ly in 1.0f64..60.0) {
        let g = make_grid(16, 16, lx, ly).unwrap();
        let mut r = rng(seed);
        let f = random_complex_field(&g, &mut r);
        let hat = forward(&f).unwrap();
        prop_assert!((f.l2() - hat.l2()).abs() < 1e-12 * f.l2().max(1e-6));
    }

    #[test]
    fn group_is_unitary_for_any_time(seed in 0u64..1 << 20, t in -20.0f64..20.0) {
        let g = make_grid(16, 16, 11.0, 7.0).unwrap();
        let mut r = rng(seed);
        let f = random_complex_field(&g, &mut r);
        let v = propagate(&f, t).unwrap();
        prop_assert!((v.l2() - f.l2()).abs() < 1e-12 * f.l2().max(1e-6));
        let back = propagate(&v, -t).unwrap();
        prop_assert!(rel_l2(&back, &f) < 1e-11);
    }

    #[test]
    fn mixed_norm_is_absolutely_homogeneous(
        seed in 0u64..1 << 20,
        scale in -4.0f64..4.0,
        p in 1.0f64..6.0,
    ) {
        use AxisSet::*;
        let g = make_grid(8, 8, 5.0, 5.0).unwrap();
        let mut r = rng(seed);
        let fields: Vec<_> = (0..3).map(|_| random_real_field(&g, &mut r)).collect();
        let traj = Trajectory::new(vec![0.0, 0.1, 0.2], fields).unwrap();
        let spec = MixedNormSpec::new(vec![(T, Exponent::Finite(p)), (XY, Exponent::Inf)]);
        let base = mixed_norm(&traj, &spec).unwrap();
        let scaled = mixed_norm(&traj.scaled(Complex64::new(scale, 0.0)), &spec).unwrap();
        prop_assert!((scaled - scale.abs() * base).abs() < 1e-11 * base.max(1e-6));
    }

    #[test]
    fn nonlinearity_is_odd_in_even_degrees(seed in 0u64..1 << 20) {
        // for even k, (-u)^k d_x(-u) = -u^k d_x u
        let g = make_grid(16, 16, 9.0, 9.0).unwrap();
        let mut r = rng(seed);
        let u = random_real_field(&g, &mut r);
        let a = gzk_core::solver::nonlinearity(&u, 2).unwrap();
        let b = gzk_core::solver::nonlinearity(&u.scaled(Complex64::new(-1.0, 0.0)), 2).unwrap();
        prop_assert!(rel_l2(&b, &a.scaled(Complex64::new(-1.0, 0.0))) < 1e-11);
    }
}
