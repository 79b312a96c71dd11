//! Legendre kernels, Bregman distances and relative-smoothness estimates.
//!
//! Two kernels are built in:
//!
//! * `Euclidean`: `h(x) = ½‖x‖²`, for which every Bregman quantity reduces to
//!   its Euclidean counterpart.
//! * `Quartic`: `h(x) = ¼‖x‖⁴ + ½‖x‖²`, 1-strongly convex with
//!   `∇h(x) = (‖x‖² + 1) x`. Its conjugate gradient is `∇h*(z) = t z` where
//!   `t > 0` is the root of `‖z‖² t³ + t − 1 = 0`.
//!
//! Custom kernels are callback bundles. Only a conjugate roundtrip at a probe
//! point is checked when one is registered.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::point::Point;

pub type ValueFn = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;
pub type MapFn = Arc<dyn Fn(&Point) -> Point + Send + Sync>;
pub type FallibleMapFn = Arc<dyn Fn(&Point) -> Result<Point> + Send + Sync>;
/// `(x, u) ↦ ⟨u, ∇²h(x) u⟩`.
pub type QuadFormFn = Arc<dyn Fn(&Point, &Point) -> f64 + Send + Sync>;
pub type DomainFn = Arc<dyn Fn(&Point) -> bool + Send + Sync>;

const CUBIC_TOL: f64 = 1e-14;
const CUBIC_MAX_ITER: usize = 100;
const ROUNDTRIP_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelKind {
    Euclidean,
    Quartic,
    Custom,
}

/// User-supplied kernel.
#[derive(Clone)]
pub struct CustomKernel {
    pub value: ValueFn,
    pub grad: MapFn,
    pub grad_conj: FallibleMapFn,
    pub hessian_form: Option<QuadFormFn>,
    pub kappa: f64,
    pub domain: DomainFn,
}

#[derive(Clone)]
pub enum Kernel {
    Euclidean,
    Quartic,
    Custom(Arc<CustomKernel>),
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kernel::Euclidean => write!(f, "Euclidean"),
            Kernel::Quartic => write!(f, "Quartic"),
            Kernel::Custom(c) => write!(f, "Custom(kappa={})", c.kappa),
        }
    }
}

impl Kernel {
    /// Registers a custom kernel after checking `kappa > 0` and the conjugate
    /// roundtrip `∇h(∇h*(probe)) = probe`.
    pub fn custom(kernel: CustomKernel, probe: &Point) -> Result<Self> {
        if !(kernel.kappa > 0.0) || !kernel.kappa.is_finite() {
            return Err(Error::Contract(format!(
                "kernel modulus must be positive, got {}",
                kernel.kappa
            )));
        }
        let back = (kernel.grad)(&(kernel.grad_conj)(probe)?);
        let err = back.distance(probe);
        if !(err <= ROUNDTRIP_TOL * (1.0 + probe.norm())) {
            return Err(Error::Contract(format!(
                "custom kernel fails the conjugate roundtrip (error {err:e})"
            )));
        }
        Ok(Kernel::Custom(Arc::new(kernel)))
    }

    pub fn kind(&self) -> KernelKind {
        match self {
            Kernel::Euclidean => KernelKind::Euclidean,
            Kernel::Quartic => KernelKind::Quartic,
            Kernel::Custom(_) => KernelKind::Custom,
        }
    }

    /// Strong-convexity modulus κ.
    pub fn kappa(&self) -> f64 {
        match self {
            Kernel::Euclidean | Kernel::Quartic => 1.0,
            Kernel::Custom(c) => c.kappa,
        }
    }

    /// Membership in int dom(h).
    pub fn contains(&self, x: &Point) -> bool {
        match self {
            Kernel::Euclidean | Kernel::Quartic => x.is_finite(),
            Kernel::Custom(c) => x.is_finite() && (c.domain)(x),
        }
    }

    pub fn value(&self, x: &Point) -> Result<f64> {
        x.check_finite("kernel value")?;
        Ok(self.value_unchecked(x))
    }

    pub fn grad(&self, x: &Point) -> Result<Point> {
        x.check_finite("kernel gradient")?;
        Ok(self.grad_unchecked(x))
    }

    /// `∇h* = (∇h)⁻¹`.
    pub fn grad_conj(&self, z: &Point) -> Result<Point> {
        z.check_finite("conjugate gradient")?;
        match self {
            Kernel::Euclidean => Ok(z.clone()),
            Kernel::Quartic => {
                let t = quartic_conj_scale(z.norm_sq())?;
                Ok(z.scale(t))
            }
            Kernel::Custom(c) => (c.grad_conj)(z),
        }
    }

    /// `⟨u, ∇²h(x) u⟩`.
    pub fn hessian_form(&self, x: &Point, u: &Point) -> Result<f64> {
        x.check_same_len(u, "kernel hessian")?;
        match self {
            Kernel::Euclidean => Ok(u.norm_sq()),
            Kernel::Quartic => {
                let xu = x.dot(u);
                Ok((x.norm_sq() + 1.0) * u.norm_sq() + 2.0 * xu * xu)
            }
            Kernel::Custom(c) => match &c.hessian_form {
                Some(q) => Ok(q(x, u)),
                None => Err(Error::Unsupported(
                    "custom kernel without a Hessian form".into(),
                )),
            },
        }
    }

    pub(crate) fn value_unchecked(&self, x: &Point) -> f64 {
        match self {
            Kernel::Euclidean => 0.5 * x.norm_sq(),
            Kernel::Quartic => {
                let s = x.norm_sq();
                0.25 * s * s + 0.5 * s
            }
            Kernel::Custom(c) => (c.value)(x),
        }
    }

    pub(crate) fn grad_unchecked(&self, x: &Point) -> Point {
        match self {
            Kernel::Euclidean => x.clone(),
            Kernel::Quartic => x.scale(x.norm_sq() + 1.0),
            Kernel::Custom(c) => (c.grad)(x),
        }
    }
}

/// Positive root of `s t³ + t − 1 = 0` for `s = ‖z‖² ≥ 0`.
///
/// The cubic is increasing and convex on `t > 0` with the root in `(0, 1]`.
/// Newton started to the right of the root decreases monotonically onto it;
/// bisection takes over whenever a step leaves the bracket.
pub fn quartic_conj_scale(s: f64) -> Result<f64> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::InvalidInput(format!("squared norm {s} is not valid")));
    }
    if s == 0.0 {
        return Ok(1.0);
    }
    let phi = |t: f64| (s * t * t + 1.0) * t - 1.0;
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    // φ(s^{-1/3}) = s^{-1/3} > 0, so this start lies right of the root.
    let mut t = s.cbrt().recip().min(1.0);
    for _ in 0..CUBIC_MAX_ITER {
        let f = phi(t);
        if f == 0.0 {
            return Ok(t);
        }
        if f > 0.0 {
            hi = hi.min(t);
        } else {
            lo = lo.max(t);
        }
        let mut next = t - f / (3.0 * s * t * t + 1.0);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - t).abs() <= CUBIC_TOL {
            return Ok(next);
        }
        t = next;
    }
    Err(Error::Numerical(format!(
        "quartic conjugate cubic did not converge for |z|^2 = {s:e}"
    )))
}

pub fn kernel_value(h: &Kernel, x: &Point) -> Result<f64> {
    h.value(x)
}

pub fn kernel_grad(h: &Kernel, x: &Point) -> Result<Point> {
    h.grad(x)
}

pub fn kernel_grad_conj(h: &Kernel, z: &Point) -> Result<Point> {
    h.grad_conj(z)
}

/// `D_h(x, y) = h(x) − h(y) − ⟨∇h(y), x − y⟩`, clamped at zero against
/// rounding.
pub fn bregman_distance(h: &Kernel, x: &Point, y: &Point) -> Result<f64> {
    x.check_same_len(y, "bregman distance")?;
    x.check_finite("bregman distance")?;
    y.check_finite("bregman distance")?;
    Ok(bregman_distance_unchecked(h, x, y))
}

pub(crate) fn bregman_distance_unchecked(h: &Kernel, x: &Point, y: &Point) -> f64 {
    if x == y {
        return 0.0;
    }
    match h {
        // Direct form avoids cancellation between h(x) and h(y).
        Kernel::Euclidean => 0.5 * x.sub(y).norm_sq(),
        // ½(‖y‖²+1)‖d‖² + ¼(‖x‖² − ‖y‖²)² with d = x − y.
        Kernel::Quartic => {
            let d = x.sub(y);
            let dd = d.norm_sq();
            let gap = 2.0 * y.dot(&d) + dd;
            0.5 * (y.norm_sq() + 1.0) * dd + 0.25 * gap * gap
        }
        Kernel::Custom(_) => {
            let gy = h.grad_unchecked(y);
            let mut inner = 0.0;
            for ((gi, xi), yi) in gy.values().iter().zip(x.values()).zip(y.values()) {
                inner += gi * (xi - yi);
            }
            (h.value_unchecked(x) - h.value_unchecked(y) - inner).max(0.0)
        }
    }
}

/// Absolute residual of the three-point identity
/// `D(x,z) − D(x,y) − D(y,z) = ⟨∇h(y) − ∇h(z), x − y⟩`.
pub fn three_point_residual(h: &Kernel, x: &Point, y: &Point, z: &Point) -> Result<f64> {
    x.check_same_len(y, "three-point identity")?;
    x.check_same_len(z, "three-point identity")?;
    let lhs = raw_distance(h, x, z)? - raw_distance(h, x, y)? - raw_distance(h, y, z)?;
    let gy = h.grad(y)?;
    let gz = h.grad(z)?;
    let rhs = gy.sub(&gz).dot(&x.sub(y));
    Ok((lhs - rhs).abs())
}

// Unclamped distance so the identity is checked on the raw algebra.
fn raw_distance(h: &Kernel, x: &Point, y: &Point) -> Result<f64> {
    let gy = h.grad(y)?;
    Ok(h.value(x)? - h.value(y)? - gy.dot(&x.sub(y)))
}

/// Empirical relative-smoothness constant of a pair `(f, h)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmadBound {
    /// Largest observed `⟨u, ∇²f(x) u⟩ / ⟨u, ∇²h(x) u⟩`.
    pub l: f64,
    pub samples: usize,
}

/// Maximum over paired samples `(x_i, u_i)` of the Hessian ratio, a lower
/// estimate of the tightest L for which `Lh − f` is convex.
pub fn estimate_smad_bound(
    f_hessian_action: &dyn Fn(&Point, &Point) -> Result<Point>,
    h: &Kernel,
    sample_points: &[Point],
    sample_dirs: &[Point],
) -> Result<SmadBound> {
    if sample_points.is_empty() {
        return Err(Error::InvalidInput("need at least one sample".into()));
    }
    if sample_points.len() != sample_dirs.len() {
        return Err(Error::InvalidInput(format!(
            "{} sample points but {} directions",
            sample_points.len(),
            sample_dirs.len()
        )));
    }
    let mut l = 0.0_f64;
    for (x, u) in sample_points.iter().zip(sample_dirs) {
        let hu = f_hessian_action(x, u)?;
        let num = u.dot(&hu);
        let den = h.hessian_form(x, u)?;
        if !(den > 0.0) {
            return Err(Error::Contract(format!(
                "kernel curvature {den:e} is not positive; h must be strongly convex"
            )));
        }
        if !num.is_finite() {
            return Err(Error::Numerical("non-finite Hessian action".into()));
        }
        l = l.max(num / den);
    }
    Ok(SmadBound {
        l,
        samples: sample_points.len(),
    })
}

/// Central finite-difference Hessian action `u ↦ ∇²f(x) u` built from a
/// gradient oracle. `step` is measured along the unit direction.
pub fn fd_hessian_action<'a>(
    grad: &'a dyn Fn(&Point) -> Result<Point>,
    step: f64,
) -> impl Fn(&Point, &Point) -> Result<Point> + 'a {
    move |x: &Point, u: &Point| {
        let nu = u.norm();
        if nu == 0.0 {
            return Ok(u.clone());
        }
        let e = step / nu;
        let gp = grad(&x.axpy(e, u))?;
        let gm = grad(&x.axpy(-e, u))?;
        Ok(gp.sub(&gm).scale(1.0 / (2.0 * e)))
    }
}
