//! Image quality metrics.

use crate::error::{Error, Result};
use crate::point::{Point, Shape};

/// Reported PSNR when the images are identical.
pub const PSNR_CAP: f64 = 999.0;

const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;
const SSIM_K1: f64 = 0.01;
const SSIM_K2: f64 = 0.03;

/// `10 log10(peak² / MSE)`, capped at [`PSNR_CAP`].
pub fn psnr(x: &Point, reference: &Point, peak: f64) -> Result<f64> {
    same_shape(x, reference)?;
    if !(peak > 0.0) || !peak.is_finite() {
        return Err(Error::InvalidInput(format!("peak must be positive, got {peak}")));
    }
    let mse = x.values()
        .iter()
        .zip(reference.values())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / x.len() as f64;
    if mse == 0.0 {
        return Ok(PSNR_CAP);
    }
    Ok((10.0 * (peak * peak / mse).log10()).min(PSNR_CAP))
}

/// Mean SSIM, clamped to `[0, 1]`.
pub fn ssim(x: &Point, reference: &Point, peak: f64) -> Result<f64> {
    Ok(ssim_signed(x, reference, peak)?.clamp(0.0, 1.0))
}

/// Mean local SSIM in `[−1, 1]` with an 11×11 Gaussian window (σ = 1.5) and
/// mirrored borders.
pub fn ssim_signed(x: &Point, reference: &Point, peak: f64) -> Result<f64> {
    let shape = same_shape(x, reference)?;
    if !(peak > 0.0) || !peak.is_finite() {
        return Err(Error::InvalidInput(format!("peak must be positive, got {peak}")));
    }
    if shape.height < SSIM_WINDOW || shape.width < SSIM_WINDOW {
        return Err(Error::InvalidInput(format!(
            "SSIM needs at least {SSIM_WINDOW}x{SSIM_WINDOW} pixels, got {shape}"
        )));
    }
    let w = gaussian_window();
    let a = x.values();
    let b = reference.values();
    let prod = |f: &dyn Fn(f64, f64) -> f64| -> Vec<f64> { a.iter().zip(b).map(|(&p, &q)| f(p, q)).collect() };
    let mu_x = blur(a, shape, &w);
    let mu_y = blur(b, shape, &w);
    let xx = blur(&prod(&|p, _| p * p), shape, &w);
    let yy = blur(&prod(&|_, q| q * q), shape, &w);
    let xy = blur(&prod(&|p, q| p * q), shape, &w);
    let c1 = (SSIM_K1 * peak).powi(2);
    let c2 = (SSIM_K2 * peak).powi(2);
    let total: f64 = (0..shape.len())
        .map(|i| {
            let (mx, my) = (mu_x[i], mu_y[i]);
            let vx = xx[i] - mx * mx;
            let vy = yy[i] - my * my;
            let cov = xy[i] - mx * my;
            ((2.0 * mx * my + c1) * (2.0 * cov + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2))
        })
        .sum();
    Ok(total / shape.len() as f64)
}

fn same_shape(x: &Point, reference: &Point) -> Result<Shape> {
    x.check_same_len(reference, "metric inputs")?;
    match (x.shape(), reference.shape()) {
        (Some(a), Some(b)) if a != b => Err(Error::InvalidInput(format!(
            "shape mismatch: {a} vs {b}"
        ))),
        (Some(s), _) | (None, Some(s)) => Ok(s),
        (None, None) => Ok(Shape::new(1, x.len())),
    }
}

fn gaussian_window() -> Vec<f64> {
    let r = (SSIM_WINDOW / 2) as f64;
    let w: Vec<f64> = (0..SSIM_WINDOW)
        .map(|i| (-(i as f64 - r).powi(2) / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp())
        .collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|v| v / s).collect()
}

/// Half-sample symmetric index: `… b a | a b c … | c b …`.
fn mirror(i: isize, n: usize) -> usize {
    let period = 2 * n as isize;
    let j = i.rem_euclid(period);
    if j < n as isize {
        j as usize
    } else {
        (period - 1 - j) as usize
    }
}

fn blur(v: &[f64], shape: Shape, w: &[f64]) -> Vec<f64> {
    let (h, wd) = (shape.height, shape.width);
    let r = (w.len() / 2) as isize;
    let mut tmp = vec![0.0; v.len()];
    for i in 0..h {
        for j in 0..wd {
            tmp[i * wd + j] = w
                .iter()
                .enumerate()
                .map(|(k, c)| c * v[i * wd + mirror(j as isize + k as isize - r, wd)])
                .sum();
        }
    }
    let mut out = vec![0.0; v.len()];
    for i in 0..h {
        for j in 0..wd {
            out[i * wd + j] = w
                .iter()
                .enumerate()
                .map(|(k, c)| c * tmp[mirror(i as isize + k as isize - r, h) * wd + j])
                .sum();
        }
    }
    out
}
