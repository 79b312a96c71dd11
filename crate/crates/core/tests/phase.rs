use std::f64::consts::PI;

use bregdc_core::phantom::binary_phantom;
use bregdc_core::phase::{
    build_pr_problem, cdp_adjoint, cdp_forward, pr_f1, pr_f2, pr_objective, simulate_pr, spectral_init,
    CdpOperator, PrMeasurement, PrNoise, PrPrior,
};
use bregdc_core::{solve, BetaSchedule, Point, Shape, SolverConfig};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;

fn gaussian_image(rng: &mut impl Rng, shape: Shape) -> Point {
    let v = (0..shape.len()).map(|_| StandardNormal.sample(&mut *rng)).collect();
    Point::image(shape, v).unwrap()
}

fn gaussian_complex(rng: &mut impl Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(StandardNormal.sample(&mut *rng), StandardNormal.sample(&mut *rng)))
        .collect()
}

fn re_inner(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p.conj() * q).re).sum()
}

/// Unnormalised double sum, divided by `√(HW)` at the end.
fn direct_dft(shape: Shape, mask: &[Complex64], x: &Point) -> Vec<Complex64> {
    let (h, w) = (shape.height, shape.width);
    let mut out = vec![Complex64::default(); h * w];
    for u in 0..h {
        for v in 0..w {
            let mut acc = Complex64::default();
            for i in 0..h {
                for j in 0..w {
                    let phase = -2.0 * PI * ((u * i) as f64 / h as f64 + (v * j) as f64 / w as f64);
                    acc += mask[i * w + j] * x.values()[i * w + j] * Complex64::from_polar(1.0, phase);
                }
            }
            out[u * w + v] = acc / ((h * w) as f64).sqrt();
        }
    }
    out
}

#[test]
fn adjoint_identity_on_random_pairs() {
    let shape = Shape::new(12, 10);
    let k = CdpOperator::random(shape, 3, 17).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let x = gaussian_image(&mut rng, shape);
        let z = gaussian_complex(&mut rng, k.output_len());
        let lhs = re_inner(&cdp_forward(&k, &x).unwrap(), &z);
        let rhs = x.dot(&cdp_adjoint(&k, &z).unwrap());
        assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()), "{lhs} vs {rhs}");
    }
}

#[test]
fn forward_matches_direct_summation() {
    let shape = Shape::new(3, 5);
    let k = CdpOperator::random(shape, 2, 41).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
    let x = gaussian_image(&mut rng, shape);
    let fast = cdp_forward(&k, &x).unwrap();
    let n = shape.len();
    for (r, mask) in k.masks().iter().enumerate() {
        let slow = direct_dft(shape, mask, &x);
        for (a, b) in fast[r * n..(r + 1) * n].iter().zip(&slow) {
            assert!((a - b).norm() <= 1e-12 * (1.0 + b.norm()));
        }
    }
}

#[test]
fn forward_preserves_energy_per_mask() {
    let shape = Shape::new(16, 9);
    let k = CdpOperator::random(shape, 5, 3).unwrap();
    let x = gaussian_image(&mut rand_chacha::ChaCha8Rng::seed_from_u64(1), shape);
    let energy: f64 = cdp_forward(&k, &x).unwrap().iter().map(|c| c.norm_sqr()).sum();
    assert!((energy - 5.0 * x.norm_sq()).abs() <= 1e-10 * energy);
}

#[test]
fn mask_file_roundtrip() {
    let k = CdpOperator::random(Shape::new(4, 6), 3, 77).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("masks.cdpm");
    k.save_masks(&path).unwrap();
    let back = CdpOperator::load_masks(&path).unwrap();
    assert_eq!(back.shape(), k.shape());
    assert_eq!(back.masks(), k.masks());
    let mut bytes = std::fs::read(&path).unwrap();
    bytes.push(0);
    assert!(CdpOperator::read_masks(bytes.as_slice(), "masks.cdpm").is_err());
}

#[test]
fn non_unit_masks_are_rejected() {
    let mut masks = vec![vec![Complex64::new(1.0, 0.0); 4]];
    masks[0][2] = Complex64::new(0.5, 0.0);
    assert!(CdpOperator::new(Shape::new(2, 2), masks).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn forward_is_linear(seed in any::<u64>(), a in -3.0..3.0f64, b in -3.0..3.0f64) {
        let shape = Shape::new(5, 7);
        let k = CdpOperator::random(shape, 2, seed).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x55);
        let x = gaussian_image(&mut rng, shape);
        let y = gaussian_image(&mut rng, shape);
        let lhs = cdp_forward(&k, &x.scale(a).add(&y.scale(b))).unwrap();
        let kx = cdp_forward(&k, &x).unwrap();
        let ky = cdp_forward(&k, &y).unwrap();
        for ((l, p), q) in lhs.iter().zip(&kx).zip(&ky) {
            prop_assert!((l - (p * a + q * b)).norm() <= 1e-12 * (1.0 + l.norm()));
        }
    }

    #[test]
    fn splitting_reproduces_the_objective(seed in any::<u64>(), scale in 0.1..10.0f64) {
        let shape = Shape::new(6, 6);
        let k = CdpOperator::random(shape, 3, seed).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let d: Vec<f64> = (0..k.output_len()).map(|_| rng.random_range(-1.0..20.0)).collect();
        let d = PrMeasurement::new(&k, d).unwrap();
        let x = gaussian_image(&mut rng, shape).scale(scale);
        let f = pr_objective(&k, &d, &x).unwrap();
        let split = pr_f1(&k, &d, &x).unwrap() - pr_f2(&k, &d, &x).unwrap();
        prop_assert!((f - split).abs() <= 1e-10 * (1.0 + f.abs()), "{} vs {}", f, split);
    }
}

#[test]
fn step_condition_examples() {
    let (k, _, d) = noiseless_setup();
    // The bound is 12, so λ must stay below 1/12.
    assert!(build_pr_problem(&k, &d, PrPrior::None, 0.08, 0.51, 0.01).is_ok());
    let err = build_pr_problem(&k, &d, PrPrior::None, 0.09, 0.51, 0.01).unwrap_err();
    assert!(err.to_string().contains("lambda"), "{err}");
}

fn noiseless_setup() -> (CdpOperator, Point, PrMeasurement) {
    let x = binary_phantom();
    let k = CdpOperator::random(x.shape().unwrap(), 4, 7).unwrap();
    let d = simulate_pr(&k, &x, PrNoise::None, 0).unwrap();
    (k, x, d)
}

#[test]
fn objective_never_increases_without_extrapolation() {
    let (k, _, d) = noiseless_setup();
    let lambda = 0.9 / 13.0;
    let problem = build_pr_problem(&k, &d, PrPrior::None, lambda, 0.51, 0.01).unwrap();
    let cfg = SolverConfig::new(lambda).with_beta(BetaSchedule::Zero).with_max_iter(500).with_tol(f64::MIN_POSITIVE);
    let x0 = spectral_init(&k, &d, 50, 3).unwrap();
    let r = solve(&problem, &cfg, &x0).unwrap();
    let psi: Vec<f64> = r.trace.iter().map(|t| t.psi.unwrap()).collect();
    for w in psi.windows(2) {
        assert!(w[1] <= w[0] + 1e-8, "{} -> {}", w[0], w[1]);
    }
    let last = pr_objective(&k, &d, &r.x_final).unwrap();
    assert!(last <= psi[psi.len() - 1] + 1e-8);
}

#[test]
fn noiseless_solve_fits_the_data() {
    let (k, _, d) = noiseless_setup();
    let lambda = 0.9 / 13.0;
    let problem = build_pr_problem(&k, &d, PrPrior::None, lambda, 0.51, 0.01).unwrap();
    let cfg = SolverConfig::new(lambda).with_beta(BetaSchedule::fista()).with_tol(1e-12).with_max_iter(20_000);
    let x0 = spectral_init(&k, &d, 50, 3).unwrap();
    let r = solve(&problem, &cfg, &x0).unwrap();
    let f = pr_objective(&k, &d, &r.x_final).unwrap();
    assert!(f < 1e-6 * d.norm_sq(), "objective {f:e} after {} iterations", r.iterations);
}
