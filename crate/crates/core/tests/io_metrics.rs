use bregdc_core::image_io::{load_image, save_image, ImageFormat};
use bregdc_core::metrics::{psnr, ssim, PSNR_CAP};
use bregdc_core::phantom::{phantom_by_name, PHANTOM_NAMES};
use bregdc_core::{Point, Shape};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

fn noisy(x: &Point, amp: f64, seed: u64) -> Point {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    x.with_values(x.values().iter().map(|v| v + amp * rng.random_range(-1.0..1.0)).collect())
}

#[test]
fn every_format_roundtrips_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let x = phantom_by_name("shepp-logan", Shape::new(20, 17)).unwrap();
    let rounded = x.map(|v| v.round());

    let p8 = dir.path().join("a.pgm");
    save_image(&p8, &rounded, ImageFormat::Pgm { maxval: 255 }).unwrap();
    assert_eq!(load_image(&p8).unwrap(), rounded);

    let p16 = dir.path().join("b.pgm");
    let wide = rounded.scale(200.0);
    save_image(&p16, &wide, ImageFormat::Pgm { maxval: 65535 }).unwrap();
    assert_eq!(load_image(&p16).unwrap(), wide);

    let pf = dir.path().join("c.bdcf");
    let signed = noisy(&x, 40.0, 1).map(|v| v - 30.0);
    save_image(&pf, &signed, ImageFormat::from_path(&pf)).unwrap();
    let back = load_image(&pf).unwrap();
    assert_eq!(back.shape(), signed.shape());
    for (a, b) in back.values().iter().zip(signed.values()) {
        assert_eq!(*a, *b as f32 as f64);
    }
}

#[test]
fn missing_file_names_the_path() {
    let err = load_image(std::path::Path::new("/nonexistent/img.pgm")).unwrap_err();
    assert!(err.to_string().contains("img.pgm"), "{err}");
}

#[test]
fn metric_reference_values() {
    let x = phantom_by_name("disks", Shape::new(32, 32)).unwrap();
    assert_eq!(psnr(&x, &x, 255.0).unwrap(), PSNR_CAP);
    assert_eq!(ssim(&x, &x, 255.0).unwrap(), 1.0);
    // A uniform offset of 1 gives MSE 1.
    let shifted = x.map(|v| v + 1.0);
    let want = 20.0 * 255f64.log10();
    assert!((psnr(&shifted, &x, 255.0).unwrap() - want).abs() < 1e-12);

    let flat = Point::image(Shape::new(32, 32), vec![128.0; 1024]).unwrap();
    assert!(ssim(&noisy(&flat, 60.0, 3), &flat, 255.0).unwrap() < 0.5);
    let affine = x.map(|v| 0.5 * v + 20.0);
    assert!(ssim(&affine, &x, 255.0).unwrap() < 1.0);
}

#[test]
fn phantoms_have_zero_background_and_full_range() {
    for name in PHANTOM_NAMES {
        let x = phantom_by_name(name, Shape::new(64, 64)).unwrap();
        let v = x.values();
        assert_eq!(v[0], 0.0, "{name}");
        assert!(v.iter().all(|p| (0.0..=255.0).contains(p)), "{name}");
        assert!(v.iter().cloned().fold(0.0, f64::max) > 100.0, "{name}");
    }
    assert!(phantom_by_name("nope", Shape::new(8, 8)).is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn psnr_drops_and_ssim_stays_bounded_under_noise(seed in any::<u64>(), a in 1.0..20.0f64, b in 1.0..20.0f64) {
        let x = phantom_by_name("blocks", Shape::new(24, 24)).unwrap();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let small = noisy(&x, lo, seed);
        let large = small.sub(&x).scale(hi / lo).add(&x);
        prop_assert!(psnr(&large, &x, 255.0).unwrap() <= psnr(&small, &x, 255.0).unwrap() + 1e-9);
        let s = ssim(&large, &x, 255.0).unwrap();
        prop_assert!((0.0..=1.0).contains(&s));
    }
}
