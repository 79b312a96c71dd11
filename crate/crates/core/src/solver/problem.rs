use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::point::Point;
use crate::priors::Denoiser;

pub type ScalarFn = Arc<dyn Fn(&Point) -> Result<f64> + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(&Point) -> Result<Point> + Send + Sync>;
/// `(λ, p) ↦ argmin_u { λ g(u) + D_h(u, p) }`.
pub type ProxFn = Arc<dyn Fn(f64, &Point) -> Result<Point> + Send + Sync>;
pub type DomainFn = Arc<dyn Fn(&Point) -> bool + Send + Sync>;

/// How the prior enters the update.
#[derive(Clone)]
pub enum PriorStep {
    /// Bregman proximal map of `λ g`.
    BregmanProx(ProxFn),
    /// Plug-and-play step with a gradient-step denoiser. The prior it encodes
    /// is implicit, so `g` has no value oracle.
    Denoiser(Arc<Denoiser>),
}

impl PriorStep {
    /// `g = 0`: the proximal map is the identity.
    pub fn none() -> Self {
        PriorStep::BregmanProx(Arc::new(|_, p: &Point| Ok(p.clone())))
    }

    pub fn is_implicit(&self) -> bool {
        matches!(self, PriorStep::Denoiser(_))
    }
}

impl fmt::Debug for PriorStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PriorStep::BregmanProx(_) => write!(f, "BregmanProx"),
            PriorStep::Denoiser(d) => write!(f, "Denoiser(L={})", d.lipschitz_bound()),
        }
    }
}

/// Oracles for `min f1(x) − f2(x) + g(x)` over int dom(h).
#[derive(Clone)]
pub struct DcProblem {
    pub(crate) f1_value: ScalarFn,
    pub(crate) f1_grad: VectorFn,
    pub(crate) f2_value: ScalarFn,
    pub(crate) f2_subgrad: VectorFn,
    pub(crate) prior_step: PriorStep,
    pub(crate) g_value: Option<ScalarFn>,
    pub(crate) kernel: Kernel,
    pub(crate) weak_convexity_eta: f64,
    pub(crate) smad_constant: f64,
    pub(crate) domain_member: Option<DomainFn>,
}

impl fmt::Debug for DcProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DcProblem")
            .field("kernel", &self.kernel)
            .field("prior_step", &self.prior_step)
            .field("explicit_prior", &self.g_value.is_some())
            .field("weak_convexity_eta", &self.weak_convexity_eta)
            .field("smad_constant", &self.smad_constant)
            .finish()
    }
}

impl DcProblem {
    /// A problem with `g = 0`, `η = 0` and L unset (0). Use the `with_*`
    /// methods to attach the prior and constants.
    pub fn new(
        kernel: Kernel,
        f1_value: ScalarFn,
        f1_grad: VectorFn,
        f2_value: ScalarFn,
        f2_subgrad: VectorFn,
    ) -> Self {
        DcProblem {
            f1_value,
            f1_grad,
            f2_value,
            f2_subgrad,
            prior_step: PriorStep::none(),
            g_value: Some(Arc::new(|_| Ok(0.0))),
            kernel,
            weak_convexity_eta: 0.0,
            smad_constant: 0.0,
            domain_member: None,
        }
    }

    /// Explicit prior: proximal map plus value oracle.
    pub fn with_prox(mut self, prox: ProxFn, g_value: ScalarFn) -> Self {
        self.prior_step = PriorStep::BregmanProx(prox);
        self.g_value = Some(g_value);
        self
    }

    /// Plug-and-play prior. Clears the value oracle.
    pub fn with_denoiser(mut self, denoiser: Arc<Denoiser>) -> Self {
        self.prior_step = PriorStep::Denoiser(denoiser);
        self.g_value = None;
        self
    }

    pub fn with_eta(mut self, eta: f64) -> Result<Self> {
        if !(eta >= 0.0) || !eta.is_finite() {
            return Err(Error::InvalidInput(format!(
                "weak convexity modulus must be >= 0, got {eta}"
            )));
        }
        self.weak_convexity_eta = eta;
        Ok(self)
    }

    /// Relative-smoothness constant L of `(f1, h)`.
    pub fn with_smad_constant(mut self, l: f64) -> Result<Self> {
        if !(l >= 0.0) || !l.is_finite() {
            return Err(Error::InvalidInput(format!("L must be >= 0, got {l}")));
        }
        self.smad_constant = l;
        Ok(self)
    }

    pub fn with_domain(mut self, member: DomainFn) -> Self {
        self.domain_member = Some(member);
        self
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn prior_step(&self) -> &PriorStep {
        &self.prior_step
    }

    pub fn weak_convexity_eta(&self) -> f64 {
        self.weak_convexity_eta
    }

    pub fn smad_constant(&self) -> f64 {
        self.smad_constant
    }

    pub fn has_explicit_prior(&self) -> bool {
        self.g_value.is_some()
    }

    pub fn in_domain(&self, x: &Point) -> bool {
        self.kernel.contains(x) && self.domain_member.as_ref().is_none_or(|d| d(x))
    }

    pub fn f1(&self, x: &Point) -> Result<f64> {
        (self.f1_value)(x)
    }

    pub fn f1_grad(&self, x: &Point) -> Result<Point> {
        (self.f1_grad)(x)
    }

    pub fn f2(&self, x: &Point) -> Result<f64> {
        (self.f2_value)(x)
    }

    pub fn f2_subgrad(&self, x: &Point) -> Result<Point> {
        (self.f2_subgrad)(x)
    }

    pub fn g(&self, x: &Point) -> Result<f64> {
        match &self.g_value {
            Some(g) => g(x),
            None => Err(Error::Unsupported(
                "the plug-and-play prior has no value oracle".into(),
            )),
        }
    }

    /// `Ψ(x) = f1(x) − f2(x) + g(x)`.
    pub fn psi(&self, x: &Point) -> Result<f64> {
        let g = self.g(x)?;
        Ok(self.f1(x)? - self.f2(x)? + g)
    }

    /// Applies the prior step at `p`.
    pub fn apply_prior(&self, lambda: f64, p: &Point) -> Result<Point> {
        match &self.prior_step {
            PriorStep::BregmanProx(prox) => prox(lambda, p),
            PriorStep::Denoiser(d) => d.denoise(p),
        }
    }
}

/// Wraps a closure as a [`ScalarFn`].
pub fn scalar_fn(f: impl Fn(&Point) -> Result<f64> + Send + Sync + 'static) -> ScalarFn {
    Arc::new(f)
}

/// Wraps a closure as a [`VectorFn`].
pub fn vector_fn(f: impl Fn(&Point) -> Result<Point> + Send + Sync + 'static) -> VectorFn {
    Arc::new(f)
}

/// Wraps a closure as a [`ProxFn`].
pub fn prox_fn(f: impl Fn(f64, &Point) -> Result<Point> + Send + Sync + 'static) -> ProxFn {
    Arc::new(f)
}
