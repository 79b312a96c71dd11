//! Rician noise removal.
//!
//! With `b = √((Ax + σz₁)² + (σz₂)²)` the negative log-likelihood splits as
//! `f1 − f2` where `f1(x) = ‖Ax‖²/(2σ²)` and `f2(x) = Σ log I0(b ⊙ Ax / σ²)`,
//! both convex. The kernel is Euclidean.

mod bessel;
mod schedule;

use std::sync::Arc;

use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::linalg::{seeded_rng, Identity, LinearOperator};
use crate::point::Point;
use crate::priors::{Denoiser, WeaklyConvexPrior};
use crate::solver::DcProblem;

pub use bessel::{bessel_ratio, bessel_ratio_signed, log_i0};
pub use schedule::{rician_schedule, rician_schedule_with, RicianSchedule, TABULATED_SIGMAS};

/// Draws `b_i = √(((Ax)_i + σ z₁)² + (σ z₂)²)` with independent standard
/// normals, two per entry in order.
pub fn simulate_rician(x: &Point, a_op: &dyn LinearOperator, sigma: f64, seed: u64) -> Result<Point> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidInput(format!("sigma must be >= 0, got {sigma}")));
    }
    let ax = a_op.apply(x)?;
    ax.check_finite("A x")?;
    let mut rng = seeded_rng(seed);
    let values = ax
        .values()
        .iter()
        .map(|&v| {
            let z1: f64 = StandardNormal.sample(&mut rng);
            let z2: f64 = StandardNormal.sample(&mut rng);
            (v + sigma * z1).hypot(sigma * z2)
        })
        .collect();
    Ok(ax.with_values(values))
}

#[derive(Clone)]
pub struct RicianModel {
    sigma: f64,
    a_op: Arc<dyn LinearOperator>,
    b: Point,
}

impl std::fmt::Debug for RicianModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RicianModel")
            .field("sigma", &self.sigma)
            .field("n", &self.b.len())
            .finish()
    }
}

impl RicianModel {
    pub fn new(sigma: f64, a_op: Arc<dyn LinearOperator>, b: Point) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidInput(format!("sigma must be positive, got {sigma}")));
        }
        b.check_finite("measurement")?;
        if let Some(i) = b.values().iter().position(|&v| v < 0.0) {
            return Err(Error::InvalidInput(format!("measurement entry {i} is negative")));
        }
        Ok(RicianModel { sigma, a_op, b })
    }

    /// `A = I`.
    pub fn denoising(sigma: f64, b: Point) -> Result<Self> {
        RicianModel::new(sigma, Arc::new(Identity), b)
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn measurement(&self) -> &Point {
        &self.b
    }

    pub fn operator(&self) -> &Arc<dyn LinearOperator> {
        &self.a_op
    }

    fn forward(&self, x: &Point) -> Result<Point> {
        let ax = self.a_op.apply(x)?;
        ax.check_same_len(&self.b, "A x against measurement")?;
        Ok(ax)
    }

    pub fn f1(&self, x: &Point) -> Result<f64> {
        Ok(self.forward(x)?.norm_sq() / (2.0 * self.sigma * self.sigma))
    }

    /// `Aᵀ A x / σ²`.
    pub fn f1_grad(&self, x: &Point) -> Result<Point> {
        let s2 = self.sigma * self.sigma;
        Ok(self.a_op.adjoint(&self.forward(x)?)?.scale(1.0 / s2))
    }

    pub fn f2(&self, x: &Point) -> Result<f64> {
        let s2 = self.sigma * self.sigma;
        let ax = self.forward(x)?;
        Ok(ax
            .values()
            .iter()
            .zip(self.b.values())
            .map(|(a, b)| log_i0(b * a / s2))
            .sum())
    }

    /// `Aᵀ[(b/σ²) ⊙ I1/I0(b ⊙ Ax/σ²)]`.
    pub fn f2_subgrad(&self, x: &Point) -> Result<Point> {
        let s2 = self.sigma * self.sigma;
        let ax = self.forward(x)?;
        let w: Vec<f64> = ax
            .values()
            .iter()
            .zip(self.b.values())
            .map(|(a, b)| b / s2 * bessel_ratio_signed(b * a / s2))
            .collect();
        self.a_op.adjoint(&ax.with_values(w))
    }

    /// `f1(x) − f2(x) + μ φ(x)`.
    pub fn objective(&self, x: &Point, prior_value: &dyn Fn(&Point) -> Result<f64>, mu: f64) -> Result<f64> {
        let phi = if mu == 0.0 { 0.0 } else { mu * prior_value(x)? };
        Ok(self.f1(x)? - self.f2(x)? + phi)
    }
}

pub fn rician_f1_grad(model: &RicianModel, x: &Point) -> Result<Point> {
    model.f1_grad(x)
}

pub fn rician_f2_subgrad(model: &RicianModel, x: &Point) -> Result<Point> {
    model.f2_subgrad(x)
}

pub fn rician_objective(
    model: &RicianModel,
    x: &Point,
    prior_value: &dyn Fn(&Point) -> Result<f64>,
    mu: f64,
) -> Result<f64> {
    model.objective(x, prior_value, mu)
}

#[derive(Clone, Debug)]
pub enum RicianPrior {
    /// `g = 0`.
    None,
    /// `g = μ‖x‖₁`.
    L1(f64),
    /// `g = μ φ` for a weakly convex `φ`.
    WeaklyConvex { prior: WeaklyConvexPrior, mu: f64 },
    /// Plug-and-play step with a gradient-step denoiser.
    Denoiser(Arc<Denoiser>),
}

/// Wires the Rician model into a DC problem with the Euclidean kernel.
///
/// `L = ‖A‖²/σ²`. `η` is `1/(2λ)` for a denoiser prior and `μη_φ` for an
/// explicit one. The schedule's λ, δ, ε must satisfy the step-size condition.
pub fn build_rician_problem(
    model: &RicianModel,
    prior: RicianPrior,
    schedule: &RicianSchedule,
) -> Result<DcProblem> {
    let n = model.b.len();
    let l = model.a_op.norm_sq(n)? / (model.sigma * model.sigma);
    let lambda = schedule.lambda;

    let m1 = model.clone();
    let m2 = model.clone();
    let m3 = model.clone();
    let m4 = model.clone();
    let mut problem = DcProblem::new(
        Kernel::Euclidean,
        Arc::new(move |x: &Point| m1.f1(x)),
        Arc::new(move |x: &Point| m2.f1_grad(x)),
        Arc::new(move |x: &Point| m3.f2(x)),
        Arc::new(move |x: &Point| m4.f2_subgrad(x)),
    )
    .with_smad_constant(l)?;

    let explicit = |prior: WeaklyConvexPrior, mu: f64| {
        let p = prior.clone();
        let prox = Arc::new(move |lam: f64, y: &Point| p.prox(lam * mu, y));
        let value = Arc::new(move |x: &Point| Ok(mu * prior.value(x)?));
        (prox, value)
    };
    problem = match prior {
        RicianPrior::None => problem,
        RicianPrior::L1(mu) => {
            let (prox, value) = explicit(WeaklyConvexPrior::l1(1.0)?, check_mu(mu)?);
            problem.with_prox(prox, value)
        }
        RicianPrior::WeaklyConvex { prior, mu } => {
            let eta = check_mu(mu)? * prior.eta;
            let (prox, value) = explicit(prior, mu);
            problem.with_prox(prox, value).with_eta(eta)?
        }
        RicianPrior::Denoiser(d) => problem.with_denoiser(d).with_eta(0.5 / lambda)?,
    };

    schedule.solver_config().validate_for(&problem)?;
    Ok(problem)
}

fn check_mu(mu: f64) -> Result<f64> {
    if !(mu >= 0.0) || !mu.is_finite() {
        return Err(Error::InvalidInput(format!("prior weight must be >= 0, got {mu}")));
    }
    Ok(mu)
}
