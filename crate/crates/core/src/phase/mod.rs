//! Phase retrieval from coded diffraction patterns.
//!
//! Data `d = |Kx|² + ω`. The least-squares loss `¼‖|Kx|² − d‖²` splits into
//! `f1 = ¼‖|Kx|²‖² + ¼‖d‖²` and `f2 = ½⟨d, |Kx|²⟩`. Under the quartic kernel
//! `f1` is `L`-smooth adaptable with `L = 3 Σ_r ‖K_r‖²`.

mod operator;

use std::sync::Arc;

use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::linalg::{gaussian_vec, power_iteration, seeded_rng};
use crate::point::Point;
use crate::priors::Denoiser;
use crate::solver::{DcProblem, SolverConfig};

pub use operator::{cdp_adjoint, cdp_forward, CdpOperator};

const NORM_MAX_ITER: usize = 500;
const NORM_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PrNoise {
    None,
    /// Additive Gaussian noise scaled to this SNR in dB.
    GaussianSnr(f64),
    /// `ω_i ~ N(0, α² |Kx|²_i)`.
    Shot(f64),
}

/// Intensity data for a [`CdpOperator`].
#[derive(Clone, Debug, PartialEq)]
pub struct PrMeasurement {
    pub d: Vec<f64>,
}

impl PrMeasurement {
    pub fn new(k: &CdpOperator, d: Vec<f64>) -> Result<Self> {
        if d.len() != k.output_len() {
            return Err(Error::InvalidInput(format!(
                "measurement has {} entries, operator produces {}",
                d.len(),
                k.output_len()
            )));
        }
        if d.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("measurement has a non-finite entry".into()));
        }
        Ok(PrMeasurement { d })
    }

    pub fn norm_sq(&self) -> f64 {
        crate::point::dot(&self.d, &self.d)
    }
}

/// `|Kx|²`.
pub fn intensities(k: &CdpOperator, x: &Point) -> Result<Vec<f64>> {
    Ok(k.forward(x)?.iter().map(|c| c.norm_sqr()).collect())
}

/// `10 log10(‖clean‖² / ‖clean − d‖²)`.
pub fn snr_db(clean: &[f64], d: &[f64]) -> f64 {
    let num: f64 = clean.iter().map(|v| v * v).sum();
    let den: f64 = clean.iter().zip(d).map(|(a, b)| (a - b) * (a - b)).sum();
    10.0 * (num / den).log10()
}

pub fn simulate_pr(k: &CdpOperator, x: &Point, noise: PrNoise, seed: u64) -> Result<PrMeasurement> {
    x.check_finite("phase retrieval image")?;
    let clean = intensities(k, x)?;
    let mut rng = seeded_rng(seed);
    let d = match noise {
        PrNoise::None => clean,
        PrNoise::GaussianSnr(snr) => {
            if !snr.is_finite() {
                return Err(Error::InvalidInput(format!("SNR must be finite, got {snr}")));
            }
            let z = gaussian_vec(&mut rng, clean.len());
            let signal = crate::point::norm(&clean);
            let zn = crate::point::norm(&z);
            let s = signal / (zn * 10f64.powf(snr / 20.0));
            clean.iter().zip(&z).map(|(c, w)| c + s * w).collect()
        }
        PrNoise::Shot(alpha) => {
            if !(alpha > 0.0) || !alpha.is_finite() {
                return Err(Error::InvalidInput(format!("alpha must be positive, got {alpha}")));
            }
            clean
                .iter()
                .map(|&c| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    c + alpha * c.sqrt() * z
                })
                .collect()
        }
    };
    PrMeasurement::new(k, d)
}

fn check(k: &CdpOperator, d: &PrMeasurement) -> Result<()> {
    if d.d.len() != k.output_len() {
        return Err(Error::InvalidInput(format!(
            "measurement has {} entries, operator produces {}",
            d.d.len(),
            k.output_len()
        )));
    }
    Ok(())
}

/// `Re K†[w ⊙ Kx]` for real weights `w`.
fn weighted_normal(k: &CdpOperator, kx: &mut [Complex64], w: impl Fn(usize, Complex64) -> f64) -> Result<Point> {
    for (i, c) in kx.iter_mut().enumerate() {
        *c *= w(i, *c);
    }
    k.adjoint(kx)
}

pub fn pr_f1(k: &CdpOperator, d: &PrMeasurement, x: &Point) -> Result<f64> {
    check(k, d)?;
    let i = intensities(k, x)?;
    Ok(0.25 * crate::point::dot(&i, &i) + 0.25 * d.norm_sq())
}

/// `Re K†[Kx ⊙ |Kx|²]`.
pub fn pr_f1_grad(k: &CdpOperator, d: &PrMeasurement, x: &Point) -> Result<Point> {
    check(k, d)?;
    let mut kx = k.forward(x)?;
    weighted_normal(k, &mut kx, |_, c| c.norm_sqr())
}

pub fn pr_f2(k: &CdpOperator, d: &PrMeasurement, x: &Point) -> Result<f64> {
    check(k, d)?;
    let i = intensities(k, x)?;
    Ok(0.5 * crate::point::dot(&d.d, &i))
}

/// `Re K†[Kx ⊙ d]`.
pub fn pr_f2_subgrad(k: &CdpOperator, d: &PrMeasurement, x: &Point) -> Result<Point> {
    check(k, d)?;
    let mut kx = k.forward(x)?;
    weighted_normal(k, &mut kx, |i, _| d.d[i])
}

/// `¼‖|Kx|² − d‖²`.
pub fn pr_objective(k: &CdpOperator, d: &PrMeasurement, x: &Point) -> Result<f64> {
    check(k, d)?;
    let i = intensities(k, x)?;
    Ok(0.25 * i.iter().zip(&d.d).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
}

/// `‖|Kx|² − d‖ / ‖d‖`.
pub fn pr_relative_residual(k: &CdpOperator, d: &PrMeasurement, x: &Point) -> Result<f64> {
    Ok((4.0 * pr_objective(k, d, x)?).sqrt() / d.norm_sq().sqrt())
}

/// `3 Σ_r ‖K_r‖²` with each norm from power iteration on `K_r† K_r`.
pub fn pr_smad_bound(k: &CdpOperator) -> Result<f64> {
    let n = k.shape().len();
    let mut total = 0.0;
    for r in 0..k.num_masks() {
        let mut rng = seeded_rng(0xcd9 + r as u64);
        let est = power_iteration(
            |v| Ok(k.mask_normal(r, v)),
            gaussian_vec(&mut rng, n),
            NORM_MAX_ITER,
            NORM_TOL,
        )?;
        if !est.converged {
            return Err(Error::Numerical(format!(
                "power iteration for mask {r} did not converge in {NORM_MAX_ITER} steps"
            )));
        }
        total += est.value;
    }
    Ok(3.0 * total)
}

#[derive(Clone, Debug)]
pub enum PrPrior {
    None,
    Denoiser(Arc<Denoiser>),
}

/// Wires the CDP model into a DC problem with the quartic kernel.
///
/// A denoiser prior contributes `η = κL_g/((1 + L_g)λ)`. Fails with a
/// configuration error when `1/λ ≤ max{δ + η/κ, L}`.
pub fn build_pr_problem(
    k: &CdpOperator,
    d: &PrMeasurement,
    prior: PrPrior,
    lambda: f64,
    delta: f64,
    epsilon: f64,
) -> Result<DcProblem> {
    check(k, d)?;
    let l = pr_smad_bound(k)?;
    let kernel = Kernel::Quartic;
    let (k1, k2, k3, k4) = (k.clone(), k.clone(), k.clone(), k.clone());
    let (d1, d2, d3, d4) = (d.clone(), d.clone(), d.clone(), d.clone());
    let mut problem = DcProblem::new(
        kernel.clone(),
        Arc::new(move |x: &Point| pr_f1(&k1, &d1, x)),
        Arc::new(move |x: &Point| pr_f1_grad(&k2, &d2, x)),
        Arc::new(move |x: &Point| pr_f2(&k3, &d3, x)),
        Arc::new(move |x: &Point| pr_f2_subgrad(&k4, &d4, x)),
    )
    .with_smad_constant(l)?;
    if let PrPrior::Denoiser(den) = prior {
        let eta = den.weak_convexity_modulus(kernel.kappa()) / lambda;
        problem = problem.with_denoiser(den).with_eta(eta)?;
    }
    let mut cfg = SolverConfig::new(lambda);
    cfg.delta = delta;
    cfg.epsilon = epsilon;
    cfg.validate_for(&problem)?;
    Ok(problem)
}

/// `x_est` or `−x_est`, whichever correlates better with `x_ref`. Ties keep
/// the sign.
pub fn align_global_sign(x_est: &Point, x_ref: &Point) -> Result<Point> {
    x_est.check_same_len(x_ref, "sign alignment")?;
    Ok(if x_est.dot(x_ref) < 0.0 {
        x_est.scale(-1.0)
    } else {
        x_est.clone()
    })
}

/// Leading eigenvector of `Re K† diag(d) K`, scaled so that `‖x‖² = Σd / m`.
pub fn spectral_init(k: &CdpOperator, d: &PrMeasurement, iterations: usize, seed: u64) -> Result<Point> {
    check(k, d)?;
    let shape = k.shape();
    let mut rng = seeded_rng(seed);
    let mut v = gaussian_vec(&mut rng, shape.len());
    for _ in 0..iterations.max(1) {
        let p = Point::from_raw(v, Some(shape));
        let mut kx = k.forward(&p)?;
        let w = weighted_normal(k, &mut kx, |i, _| d.d[i])?;
        let n = w.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Numerical("spectral initialisation degenerated".into()));
        }
        v = w.scale(1.0 / n).into_values();
    }
    let energy = d.d.iter().map(|v| v.max(0.0)).sum::<f64>() / k.num_masks() as f64;
    Ok(Point::from_raw(v, Some(shape)).scale(energy.sqrt()))
}
