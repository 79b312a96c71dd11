use std::io::Write;

use bregdc_core::priors::{
    estimate_lipschitz, gs_denoise, gs_potential, load_linear_smoother, weak_convexity_modulus,
    LinearSmoother, Stencil, WeaklyConvexPrior, REFERENCE_GRID,
};
use bregdc_core::{Error, Point, Shape};
use proptest::prelude::*;

fn image(shape: Shape, r: f64) -> impl Strategy<Value = Point> {
    prop::collection::vec(-r..r, shape.len()).prop_map(move |v| Point::image(shape, v).unwrap())
}

fn builtin() -> bregdc_core::priors::Denoiser {
    LinearSmoother::new(Stencil::damped_binomial(0.8)).into_denoiser(1.0).unwrap()
}

fn priors() -> impl Strategy<Value = WeaklyConvexPrior> {
    prop_oneof![
        (0.0..3.0f64).prop_map(|mu| WeaklyConvexPrior::l1(mu).unwrap()),
        (0.1..3.0f64, 1.0..5.0f64).prop_map(|(mu, th)| WeaklyConvexPrior::mcp(mu, th).unwrap()),
    ]
}

fn prox_objective(p: &WeaklyConvexPrior, lambda: f64, y: &Point, u: &Point) -> f64 {
    lambda * p.value(u).unwrap() + 0.5 * u.distance(y).powi(2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn gs_gradient_matches_finite_differences(x in image(Shape::new(6, 7), 50.0)) {
        let d = builtin();
        let g = d.potential_grad(&x).unwrap();
        let h = 1e-5;
        let fd: Vec<f64> = (0..x.len())
            .map(|i| {
                let mut xp = x.clone();
                xp.values_mut()[i] += h;
                let mut xm = x.clone();
                xm.values_mut()[i] -= h;
                (gs_potential(&d, &xp).unwrap() - gs_potential(&d, &xm).unwrap()) / (2.0 * h)
            })
            .collect();
        let fd = Point::image(x.shape().unwrap(), fd).unwrap();
        prop_assert!(g.distance(&fd) <= 1e-5 * g.norm().max(1.0));
    }

    #[test]
    fn denoiser_residual_is_the_potential_gradient(x in image(Shape::new(9, 5), 100.0)) {
        let d = builtin();
        let residual = x.sub(&gs_denoise(&d, &x).unwrap());
        let g = d.potential_grad(&x).unwrap();
        prop_assert!(residual.distance(&g) <= 1e-13 * (1.0 + x.norm()));
    }

    #[test]
    fn weakly_convex_midpoint(p in priors(), a in image(Shape::new(1, 5), 10.0), b in image(Shape::new(1, 5), 10.0)) {
        let f = |x: &Point| p.value(x).unwrap() + 0.5 * p.eta * x.norm_sq();
        let mid = a.add(&b).scale(0.5);
        prop_assert!(f(&mid) <= 0.5 * (f(&a) + f(&b)) + 1e-9);
    }

    #[test]
    fn prox_beats_perturbations(p in priors(), y in image(Shape::new(1, 4), 8.0), lam in 0.05..0.9f64, seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let u = p.prox(lam, &y).unwrap();
        let best = prox_objective(&p, lam, &y, &u);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for radius in [1e-3, 1e-1] {
            for _ in 0..64 {
                let v = u.with_values(u.values().iter().map(|x| x + radius * rng.random_range(-1.0..1.0)).collect());
                prop_assert!(best <= prox_objective(&p, lam, &y, &v) + 1e-12);
            }
        }
    }
}

#[test]
fn builtin_smoother_is_admissible_and_estimates_agree() {
    let s = LinearSmoother::new(Stencil::damped_binomial(0.8));
    let power = s.spectral_bound(REFERENCE_GRID).unwrap();
    let d = s.into_denoiser(1.0).unwrap();
    assert!(power < 1.0);
    let sampled = estimate_lipschitz(&d, REFERENCE_GRID, 200, 5).unwrap();
    assert!((power - sampled).abs() <= 1e-3, "{power} vs {sampled}");
    // The binomial response vanishes at the Nyquist corner, where 1 − N̂ = 0.8.
    assert!((power - 0.64).abs() < 1e-4);
    assert_eq!(d.weak_convexity_modulus(1.0), weak_convexity_modulus(d.lipschitz_bound(), 1.0));
}

#[test]
fn box_filter_is_rejected() {
    match LinearSmoother::new(Stencil::box3()).into_denoiser(1.0) {
        Err(Error::Contract(msg)) => assert!(msg.contains("not admissible")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn stencil_file_loading() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("smooth.txt");
    let mut f = std::fs::File::create(&good).unwrap();
    writeln!(f, "# light smoothing\n3 3\n0 0.05 0\n0.05 0.8 0.05\n0 0.05 0").unwrap();
    let d = load_linear_smoother(&good).unwrap();
    assert!(d.lipschitz_bound() < 1.0);

    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "3 3\n0 0 0\n0 1 x\n0 0 0\n").unwrap();
    match load_linear_smoother(&bad) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, Some(3)),
        other => panic!("{other:?}"),
    }
    let asym = dir.path().join("asym.txt");
    std::fs::write(&asym, "1 3\n0.5 0.5 0\n").unwrap();
    assert!(matches!(load_linear_smoother(&asym), Err(Error::Contract(_))));
}
