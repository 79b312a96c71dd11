//! Weakly convex priors and gradient-step denoisers.
//!
//! A gradient-step denoiser is `D = I − ∇g` with `g(x) = ½‖x − N(x)‖²` for a
//! residual network `N`. It is admissible when `∇g` is `L`-Lipschitz with
//! `L < 1`.

mod smoother;
mod weakly_convex;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{gaussian_vec, seeded_rng};
use crate::point::{Point, Shape};
use crate::solver::VectorFn;

pub use smoother::{load_linear_smoother, parse_stencil, LinearSmoother, Stencil, REFERENCE_GRID};
pub use weakly_convex::{prox_l1, prox_mcp, WeaklyConvexPrior};

/// The map `N` inside `g(x) = ½‖x − N(x)‖²`.
pub trait ResidualNetwork: Send + Sync {
    fn forward(&self, x: &Point) -> Result<Point>;

    /// `∇g(x) = (I − J_N(x))ᵀ (x − N(x))`.
    fn potential_grad(&self, _x: &Point) -> Result<Point> {
        Err(Error::Unsupported("network has no gradient of its potential".into()))
    }
}

/// `N = c I`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledIdentity(pub f64);

impl ResidualNetwork for ScaledIdentity {
    fn forward(&self, x: &Point) -> Result<Point> {
        Ok(x.scale(self.0))
    }

    fn potential_grad(&self, x: &Point) -> Result<Point> {
        let r = 1.0 - self.0;
        Ok(x.scale(r * r))
    }
}

/// A network given as callbacks. Without `grad` the denoiser is unusable
/// but the potential can still be evaluated.
#[derive(Clone)]
pub struct CallbackNetwork {
    pub forward: VectorFn,
    pub grad: Option<VectorFn>,
}

impl ResidualNetwork for CallbackNetwork {
    fn forward(&self, x: &Point) -> Result<Point> {
        (self.forward)(x)
    }

    fn potential_grad(&self, x: &Point) -> Result<Point> {
        match &self.grad {
            Some(g) => g(x),
            None => Err(Error::Unsupported("no gradient callback supplied".into())),
        }
    }
}

#[derive(Clone)]
pub struct Denoiser {
    network: Arc<dyn ResidualNetwork>,
    lipschitz_bound: f64,
    gamma: f64,
}

impl fmt::Debug for Denoiser {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Denoiser")
            .field("lipschitz_bound", &self.lipschitz_bound)
            .field("gamma", &self.gamma)
            .finish()
    }
}

impl Denoiser {
    /// `lipschitz_bound` is the declared Lipschitz constant of `∇g`; it must
    /// lie in `[0, 1)`.
    pub fn new(network: Arc<dyn ResidualNetwork>, lipschitz_bound: f64, gamma: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&lipschitz_bound) {
            return Err(Error::Contract(format!(
                "denoiser Lipschitz bound must lie in [0, 1), got {lipschitz_bound}"
            )));
        }
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidInput(format!("gamma must be >= 0, got {gamma}")));
        }
        Ok(Denoiser {
            network,
            lipschitz_bound,
            gamma,
        })
    }

    pub fn lipschitz_bound(&self) -> f64 {
        self.lipschitz_bound
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn network(&self) -> &Arc<dyn ResidualNetwork> {
        &self.network
    }

    /// `g(x) = ½‖x − N(x)‖²`.
    pub fn potential(&self, x: &Point) -> Result<f64> {
        let n = self.network.forward(x)?;
        x.check_same_len(&n, "network output")?;
        Ok(0.5 * x.sub(&n).norm_sq())
    }

    pub fn potential_grad(&self, x: &Point) -> Result<Point> {
        self.network.potential_grad(x)
    }

    /// `x − ∇g(x)`.
    pub fn denoise(&self, x: &Point) -> Result<Point> {
        let g = self.network.potential_grad(x)?;
        x.check_same_len(&g, "potential gradient")?;
        Ok(x.sub(&g))
    }

    pub fn weak_convexity_modulus(&self, kappa: f64) -> f64 {
        weak_convexity_modulus(self.lipschitz_bound, kappa)
    }
}

pub fn gs_potential(d: &Denoiser, x: &Point) -> Result<f64> {
    d.potential(x)
}

pub fn gs_denoise(d: &Denoiser, x: &Point) -> Result<Point> {
    d.denoise(x)
}

/// `κL/(1+L)`: weak-convexity modulus of the implicit prior behind a
/// denoiser whose `∇g` is `L`-Lipschitz.
pub fn weak_convexity_modulus(lipschitz: f64, kappa: f64) -> f64 {
    kappa * lipschitz / (1.0 + lipschitz)
}

/// Largest sampled `‖∇g(x) − ∇g(y)‖ / ‖x − y‖` over `n_pairs` pairs on a
/// `shape` grid.
///
/// Differences cycle through Gaussian noise and cosine atoms so that both low
/// and high frequencies are probed; the first atoms are the two extreme
/// frequencies. Deterministic given `seed`.
pub fn estimate_lipschitz(d: &Denoiser, shape: Shape, n_pairs: usize, seed: u64) -> Result<f64> {
    if n_pairs == 0 {
        return Err(Error::InvalidInput("n_pairs must be >= 1".into()));
    }
    let n = shape.len();
    let mut rng = seeded_rng(seed);
    let mut best: f64 = 0.0;
    for i in 0..n_pairs {
        let x = Point::from_raw(gaussian_vec(&mut rng, n), Some(shape));
        let u = match i % 4 {
            0 => match i / 4 {
                0 => cosine_atom(shape, shape.height - 1, shape.width - 1),
                1 => cosine_atom(shape, 0, 0),
                _ => gaussian_vec(&mut rng, n),
            },
            _ => {
                use rand::Rng;
                let p = rng.random_range(0..shape.height);
                let q = rng.random_range(0..shape.width);
                cosine_atom(shape, p, q)
            }
        };
        let scale = 1e-2 * (0.5 + (i % 7) as f64);
        let u = Point::from_raw(u, Some(shape));
        let y = x.axpy(scale, &u);
        let gx = d.potential_grad(&x)?;
        let gy = d.potential_grad(&y)?;
        let ratio = gx.distance(&gy) / x.distance(&y);
        if ratio.is_finite() {
            best = best.max(ratio);
        }
    }
    Ok(best)
}

/// Separable DCT-II basis image with frequencies `(p, q)`, unit norm.
pub(crate) fn cosine_atom(shape: Shape, p: usize, q: usize) -> Vec<f64> {
    use std::f64::consts::PI;
    let (h, w) = (shape.height, shape.width);
    let row: Vec<f64> = (0..h)
        .map(|i| (PI * p as f64 * (i as f64 + 0.5) / h as f64).cos())
        .collect();
    let col: Vec<f64> = (0..w)
        .map(|j| (PI * q as f64 * (j as f64 + 0.5) / w as f64).cos())
        .collect();
    let mut v: Vec<f64> = row
        .iter()
        .flat_map(|r| col.iter().map(move |c| r * c))
        .collect();
    let nv = crate::point::norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scaled(c: f64) -> Denoiser {
        let l = (1.0 - c) * (1.0 - c);
        Denoiser::new(Arc::new(ScaledIdentity(c)), l, 0.0).unwrap()
    }

    #[test]
    fn potential_examples() {
        let x = Point::new(vec![3.0, 4.0]).unwrap();
        assert_eq!(scaled(1.0).potential(&x).unwrap(), 0.0);
        let zero = Denoiser::new(Arc::new(ScaledIdentity(0.0)), 0.999, 0.0).unwrap();
        assert_eq!(zero.potential(&x).unwrap(), 12.5);
    }

    #[test]
    fn denoise_examples() {
        let x = Point::new(vec![4.0]).unwrap();
        assert_eq!(scaled(1.0).denoise(&x).unwrap(), x);
        assert_eq!(scaled(0.5).denoise(&x).unwrap().values(), &[3.0]);
    }

    #[test]
    fn missing_gradient_is_unsupported() {
        let net = CallbackNetwork {
            forward: Arc::new(|x: &Point| Ok(x.clone())),
            grad: None,
        };
        let d = Denoiser::new(Arc::new(net), 0.0, 0.0).unwrap();
        let x = Point::new(vec![1.0]).unwrap();
        assert!(matches!(d.denoise(&x), Err(Error::Unsupported(_))));
        assert_eq!(d.potential(&x).unwrap(), 0.0);
    }

    #[test]
    fn modulus_examples() {
        assert_eq!(weak_convexity_modulus(1.0, 1.0), 0.5);
        assert_eq!(weak_convexity_modulus(0.0, 1.0), 0.0);
        assert!((weak_convexity_modulus(0.5, 2.0) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn lipschitz_of_scaled_identity() {
        let s = Shape::new(4, 4);
        assert_eq!(estimate_lipschitz(&scaled(1.0), s, 10, 1).unwrap(), 0.0);
        let l = estimate_lipschitz(&scaled(0.5), s, 10, 1).unwrap();
        assert!((l - 0.25).abs() < 1e-12);
    }

    #[test]
    fn bound_outside_unit_interval_is_rejected() {
        assert!(Denoiser::new(Arc::new(ScaledIdentity(0.0)), 1.0, 0.0).is_err());
        assert!(Denoiser::new(Arc::new(ScaledIdentity(0.0)), -0.1, 0.0).is_err());
    }
}
