use bregdc_core::kernel::{bregman_distance, kernel_grad, kernel_grad_conj, kernel_value, three_point_residual};
use bregdc_core::{Kernel, Point};
use proptest::prelude::*;

fn vec_strategy(n: usize, r: f64) -> impl Strategy<Value = Point> {
    prop::collection::vec(-r..r, n).prop_map(|v| Point::new(v).unwrap())
}

fn kernels() -> impl Strategy<Value = Kernel> {
    prop_oneof![Just(Kernel::Euclidean), Just(Kernel::Quartic)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn distance_is_nonnegative_and_strongly_convex(h in kernels(), x in vec_strategy(5, 50.0), y in vec_strategy(5, 50.0)) {
        let d = bregman_distance(&h, &x, &y).unwrap();
        prop_assert!(d >= 0.0);
        let lower = 0.5 * h.kappa() * x.distance(&y).powi(2);
        prop_assert!(d >= lower - 1e-10 * (1.0 + lower));
        prop_assert_eq!(bregman_distance(&h, &x, &x).unwrap(), 0.0);
    }

    #[test]
    fn conjugate_roundtrip(h in kernels(), z in vec_strategy(7, 577.0)) {
        let back = kernel_grad(&h, &kernel_grad_conj(&h, &z).unwrap()).unwrap();
        prop_assert!(back.distance(&z) <= 1e-10 * (1.0 + z.norm()));
    }

    #[test]
    fn three_point_identity(h in kernels(), x in vec_strategy(4, 10.0), y in vec_strategy(4, 10.0), z in vec_strategy(4, 10.0)) {
        let scale = 1.0 + kernel_value(&h, &x).unwrap() + kernel_value(&h, &y).unwrap() + kernel_value(&h, &z).unwrap();
        prop_assert!(three_point_residual(&h, &x, &y, &z).unwrap() <= 1e-10 * scale);
    }

    #[test]
    fn gradient_matches_central_differences(h in kernels(), x in vec_strategy(6, 5.0)) {
        let g = kernel_grad(&h, &x).unwrap();
        let step = 1e-5;
        let fd: Vec<f64> = (0..x.len())
            .map(|i| {
                let mut xp = x.clone();
                xp.values_mut()[i] += step;
                let mut xm = x.clone();
                xm.values_mut()[i] -= step;
                (kernel_value(&h, &xp).unwrap() - kernel_value(&h, &xm).unwrap()) / (2.0 * step)
            })
            .collect();
        let fd = Point::new(fd).unwrap();
        prop_assert!(g.distance(&fd) <= 1e-5 * g.norm().max(1.0));
    }
}

#[test]
fn quartic_conjugate_frozen_values() {
    // ∇h*(z) = t z where s t³ + t − 1 = 0 and s = ‖z‖².
    for s in [0.0_f64, 0.25, 2.0, 6.0, 1e6] {
        let z = Point::new(vec![s.sqrt(), 0.0]).unwrap();
        let x = kernel_grad_conj(&Kernel::Quartic, &z).unwrap();
        let t = if s == 0.0 { 1.0 } else { x.values()[0] / s.sqrt() };
        assert!((s * t.powi(3) + t - 1.0).abs() < 1e-14 * (3.0 * s * t * t + 1.0));
    }
    // Root of 2t³ + t − 1 from a 30-digit solve.
    let x = kernel_grad_conj(&Kernel::Quartic, &Point::new(vec![1.0, 1.0]).unwrap()).unwrap();
    assert!((x.values()[0] - 0.589_754_512_301_458_4).abs() < 1e-15);
}
