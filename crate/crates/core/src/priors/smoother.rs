use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{power_iteration, seeded_rng};
use crate::point::{Point, Shape};

use super::{Denoiser, ResidualNetwork};

/// Grid on which the spectral bound of a stencil is computed.
pub const REFERENCE_GRID: Shape = Shape {
    height: 64,
    width: 64,
};
const BOUND_MAX_ITER: usize = 100;
const BOUND_TOL: f64 = 1e-10;
const START_SEED: u64 = 0x5eed;
const SYMMETRY_TOL: f64 = 1e-12;

/// Odd-sized, centrally symmetric correlation kernel, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Stencil {
    height: usize,
    width: usize,
    coeffs: Vec<f64>,
}

impl Stencil {
    pub fn new(height: usize, width: usize, coeffs: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 || height.is_multiple_of(2) || width.is_multiple_of(2) {
            return Err(Error::InvalidInput(format!(
                "stencil dimensions must be odd and positive, got {height}x{width}"
            )));
        }
        if coeffs.len() != height * width {
            return Err(Error::InvalidInput(format!(
                "stencil {height}x{width} needs {} coefficients, got {}",
                height * width,
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("stencil has a non-finite coefficient".into()));
        }
        let n = coeffs.len();
        if let Some(i) = (0..n).find(|&i| (coeffs[i] - coeffs[n - 1 - i]).abs() > SYMMETRY_TOL) {
            return Err(Error::Contract(format!(
                "stencil is not centrally symmetric at entry ({}, {})",
                i / width,
                i % width
            )));
        }
        Ok(Stencil {
            height,
            width,
            coeffs,
        })
    }

    pub fn identity() -> Self {
        Stencil::new(1, 1, vec![1.0]).expect("valid stencil")
    }

    /// 3×3 mean filter. Not admissible as a denoiser on its own.
    pub fn box3() -> Self {
        Stencil::new(3, 3, vec![1.0 / 9.0; 9]).expect("valid stencil")
    }

    /// `(1 − w) δ + w B` with `B` the 3×3 binomial filter. For `w ∈ (0, 1]`
    /// the symbol ranges over `[1 − w, 1]`, so `‖I − N‖² = w²` on fine grids.
    pub fn damped_binomial(weight: f64) -> Self {
        let b = [1.0, 2.0, 1.0, 2.0, 4.0, 2.0, 1.0, 2.0, 1.0];
        let mut c: Vec<f64> = b.iter().map(|v| weight * v / 16.0).collect();
        c[4] += 1.0 - weight;
        Stencil::new(3, 3, c).expect("valid stencil")
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }
}

/// Half-sample symmetric index: `… c b a | a b c … | c b a …`.
fn reflect(i: isize, n: usize) -> usize {
    let n = n as isize;
    let m = i.rem_euclid(2 * n);
    (if m < n { m } else { 2 * n - 1 - m }) as usize
}

/// Stencil correlation with reflect boundary. Central symmetry makes the
/// operator self-adjoint.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSmoother {
    stencil: Stencil,
}

impl LinearSmoother {
    pub fn new(stencil: Stencil) -> Self {
        LinearSmoother { stencil }
    }

    pub fn stencil(&self) -> &Stencil {
        &self.stencil
    }

    pub fn apply(&self, x: &[f64], shape: Shape) -> Vec<f64> {
        let (h, w) = (shape.height, shape.width);
        let s = &self.stencil;
        let (ry, rx) = ((s.height / 2) as isize, (s.width / 2) as isize);
        let mut out = vec![0.0; h * w];
        for i in 0..h {
            for j in 0..w {
                let mut acc = 0.0;
                for a in 0..s.height {
                    let ii = reflect(i as isize + a as isize - ry, h);
                    let row = &x[ii * w..(ii + 1) * w];
                    let srow = &s.coeffs[a * s.width..(a + 1) * s.width];
                    for (b, c) in srow.iter().enumerate() {
                        acc += c * row[reflect(j as isize + b as isize - rx, w)];
                    }
                }
                out[i * w + j] = acc;
            }
        }
        out
    }

    /// `(I − N) x`.
    fn residual(&self, x: &[f64], shape: Shape) -> Vec<f64> {
        let n = self.apply(x, shape);
        x.iter().zip(n).map(|(a, b)| a - b).collect()
    }

    /// `(I − N)ᵀ (I − N) x`.
    pub fn normal_residual(&self, x: &[f64], shape: Shape) -> Vec<f64> {
        let r = self.residual(x, shape);
        self.residual(&r, shape)
    }

    /// Largest eigenvalue of `(I − N)ᵀ (I − N)` on `shape`, by power
    /// iteration from a checkerboard start with a small random perturbation.
    pub fn spectral_bound(&self, shape: Shape) -> Result<f64> {
        let mut rng = seeded_rng(START_SEED);
        let noise = crate::linalg::gaussian_vec(&mut rng, shape.len());
        let start: Vec<f64> = (0..shape.len())
            .map(|k| {
                let (i, j) = (k / shape.width, k % shape.width);
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                sign + 0.1 * noise[k]
            })
            .collect();
        let est = power_iteration(
            |v| Ok(self.normal_residual(v, shape)),
            start,
            BOUND_MAX_ITER,
            BOUND_TOL,
        )?;
        Ok(est.value.max(0.0))
    }

    /// Wraps the smoother as a denoiser after checking `‖I − N‖ < 1` on
    /// [`REFERENCE_GRID`].
    pub fn into_denoiser(self, gamma: f64) -> Result<Denoiser> {
        let bound = self.spectral_bound(REFERENCE_GRID)?;
        // Power iteration cannot resolve the bound finer than its tolerance.
        if !(bound < 1.0 - BOUND_TOL) {
            return Err(Error::Contract(format!(
                "smoother is not admissible: ‖(I − N)ᵀ(I − N)‖ = {bound:.6} >= 1"
            )));
        }
        Denoiser::new(Arc::new(self), bound, gamma)
    }
}

fn image_shape(x: &Point) -> Result<Shape> {
    x.shape()
        .ok_or_else(|| Error::InvalidInput("linear smoother needs an image-shaped point".into()))
}

impl ResidualNetwork for LinearSmoother {
    fn forward(&self, x: &Point) -> Result<Point> {
        let shape = image_shape(x)?;
        Ok(x.with_values(self.apply(x.values(), shape)))
    }

    fn potential_grad(&self, x: &Point) -> Result<Point> {
        let shape = image_shape(x)?;
        Ok(x.with_values(self.normal_residual(x.values(), shape)))
    }
}

/// Parses the plain-text stencil format: a `H W` line, then `H` rows of `W`
/// numbers. Blank lines and lines starting with `#` are skipped.
pub fn parse_stencil(text: &str, source_name: &str) -> Result<Stencil> {
    let err = |line: Option<usize>, message: String| Error::Parse {
        source_name: source_name.to_string(),
        line,
        message,
    };
    let mut rows = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hl, header) = rows.next().ok_or_else(|| err(None, "empty stencil file".into()))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| err(Some(hl), format!("bad header `{header}`: {e}")))?;
    let (h, w) = match dims[..] {
        [h, w] if h % 2 == 1 && w % 2 == 1 => (h, w),
        _ => {
            return Err(err(
                Some(hl),
                format!("header must be two odd positive integers, got `{header}`"),
            ))
        }
    };

    let mut coeffs = Vec::with_capacity(h * w);
    for r in 0..h {
        let (ln, line) = rows
            .next()
            .ok_or_else(|| err(None, format!("expected {h} rows, found {r}")))?;
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| err(Some(ln), format!("bad coefficient: {e}")))?;
        if vals.len() != w {
            return Err(err(Some(ln), format!("expected {w} coefficients, found {}", vals.len())));
        }
        coeffs.extend(vals);
    }
    if let Some((ln, _)) = rows.next() {
        return Err(err(Some(ln), "trailing content after the last row".into()));
    }
    Stencil::new(h, w, coeffs)
}

/// Reads a stencil file and builds an admissible denoiser from it.
pub fn load_linear_smoother(path: &Path) -> Result<Denoiser> {
    let text = std::fs::read_to_string(path).map_err(crate::error::file_err(path))?;
    let stencil = parse_stencil(&text, &path.display().to_string())?;
    LinearSmoother::new(stencil).into_denoiser(0.0)
}
