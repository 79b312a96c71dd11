//! Inertial Bregman proximal DC iteration.
//!
//! Each iteration extrapolates `y = x_k + β_k (x_k − x_{k−1})` with β_k
//! chosen by a Bregman line search, then takes
//! `x_{k+1} = P(∇h*(∇h(y) − λ(∇f1(y) − ξ_k)))` with `ξ_k ∈ ∂f2(x_k)` and `P`
//! either the Bregman proximal map of `λ g` or a gradient-step denoiser.

mod config;
mod diagnostics;
mod line_search;
mod problem;
mod trace;

pub use config::{
    BetaSchedule, SolverConfig, DEFAULT_BACKTRACK_FACTOR, DEFAULT_BACKTRACK_MAX, DEFAULT_DELTA,
    DEFAULT_EPSILON, DEFAULT_MAX_ITER, DEFAULT_TOL,
};
pub use diagnostics::{check_descent, check_descent_with, DescentReport, DEFAULT_VANISH_RATIO};
pub use line_search::{inertial_candidate, line_search_beta, next_mu, LineSearch};
pub use problem::{
    prox_fn, scalar_fn, vector_fn, DcProblem, DomainFn, PriorStep, ProxFn, ScalarFn, VectorFn,
};
pub use trace::{read_trace_csv, trace_to_csv, write_trace_csv, TRACE_HEADER};

use crate::error::{Error, Result};
use crate::kernel::bregman_distance_unchecked;
use crate::point::Point;

const REL_CHANGE_FLOOR: f64 = 1e-12;
const LYAPUNOV_SLACK: f64 = 1e-10;

/// Diagnostics for iteration `k`, taken at `x_k` before the step to `x_{k+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub k: usize,
    pub beta_accepted: f64,
    /// `Ψ(x_k)`. Absent for implicit priors.
    pub psi: Option<f64>,
    /// `H_δ(x_k, x_{k−1})`. Absent for implicit priors.
    pub lyapunov: Option<f64>,
    /// `D_h(x_{k−1}, x_k)`.
    pub dh_prev_cur: f64,
    /// `D_h(x_k, y_k)`.
    pub dh_cur_y: f64,
    /// `‖x_{k+1} − x_k‖ / max(‖x_k‖, 1e−12)`.
    pub rel_change: f64,
    pub fallback_y: bool,
}

#[derive(Clone, Debug)]
pub struct SolverResult {
    pub x_final: Point,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<IterationRecord>,
}

/// One proximal step from `y_k` with the subgradient taken at `x_k`.
pub fn ibpdca_step(
    problem: &DcProblem,
    config: &SolverConfig,
    x_k: &Point,
    y_k: &Point,
) -> Result<Point> {
    x_k.check_same_len(y_k, "ibpdca step")?;
    if !problem.in_domain(y_k) {
        return Err(Error::Domain("extrapolated point y".into()));
    }
    let xi = finite(problem.f2_subgrad(x_k)?, "subgradient of f2")?;
    let g1 = finite(problem.f1_grad(y_k)?, "gradient of f1")?;
    let hy = problem.kernel.grad_unchecked(y_k);
    let z = finite(hy.axpy(-config.lambda, &g1.sub(&xi)), "mirror step")?;
    let p = finite(problem.kernel.grad_conj(&z)?, "conjugate map")?;
    if !problem.in_domain(&p) {
        return Err(Error::Domain("pre-prior point p".into()));
    }
    let next = finite(problem.apply_prior(config.lambda, &p)?, "prior step")?;
    if !problem.in_domain(&next) {
        return Err(Error::Domain("prior output".into()));
    }
    Ok(next)
}

fn finite(p: Point, what: &str) -> Result<Point> {
    if p.is_finite() {
        Ok(p)
    } else {
        Err(Error::NonFinite(what.into()))
    }
}

/// `H_δ(x, y) = Ψ(x) + δ D_h(y, x)`.
pub fn lyapunov(problem: &DcProblem, delta: f64, x: &Point, y: &Point) -> Result<f64> {
    x.check_same_len(y, "lyapunov")?;
    if !problem.in_domain(x) {
        return Err(Error::Domain("lyapunov base point".into()));
    }
    let psi = problem.psi(x)?;
    Ok(psi + delta * bregman_distance_unchecked(&problem.kernel, y, x))
}

/// `‖x − T(x)‖ / (1 + ‖x‖)` for the β = 0 map `T`.
pub fn criticality_residual(problem: &DcProblem, config: &SolverConfig, x: &Point) -> Result<f64> {
    let next = ibpdca_step(problem, config, x, x)?;
    Ok(next.distance(x) / (1.0 + x.norm()))
}

/// Runs the iteration from `x0` with `x_{−1} = x_0`.
///
/// Stops when the relative change falls below `tol` or after `max_iter`
/// steps. A non-finite intermediate value aborts with
/// [`Error::Divergence`] carrying the trace so far. An increase of the
/// Lyapunov value is logged and does not abort.
pub fn solve(problem: &DcProblem, config: &SolverConfig, x0: &Point) -> Result<SolverResult> {
    config.validate_for(problem)?;
    x0.check_finite("initial point")?;
    if !problem.in_domain(x0) {
        return Err(Error::Domain("initial point".into()));
    }
    let explicit = problem.has_explicit_prior();
    let mut trace: Vec<IterationRecord> = Vec::new();
    let mut x_prev = x0.clone();
    let mut x = x0.clone();
    let mut mu = 1.0;
    let mut last_h: Option<f64> = None;
    let domain = |p: &Point| problem.in_domain(p);

    for k in 0..config.max_iter {
        let diverged = |trace: &[IterationRecord]| Error::Divergence {
            iteration: k,
            trace: Box::new(trace.to_vec()),
        };
        let ls = line_search::line_search_in(&problem.kernel, config, &x, &x_prev, mu, &domain)?;
        mu = ls.new_mu;

        let (psi, lyap) = if explicit {
            let psi = problem.psi(&x)?;
            if !psi.is_finite() {
                return Err(diverged(&trace));
            }
            let h = psi + config.delta * ls.dh_prev_cur;
            if let Some(prev) = last_h {
                if h > prev + LYAPUNOV_SLACK * (1.0 + prev.abs()) {
                    log::warn!("lyapunov value increased at k={k}: {prev:e} -> {h:e}");
                }
            }
            last_h = Some(h);
            (Some(psi), Some(h))
        } else {
            (None, None)
        };

        let next = match ibpdca_step(problem, config, &x, &ls.y) {
            Ok(p) => p,
            Err(Error::NonFinite(what)) => {
                log::error!("non-finite {what} at k={k}");
                return Err(diverged(&trace));
            }
            Err(e) => return Err(e),
        };
        let rel_change = next.distance(&x) / x.norm().max(REL_CHANGE_FLOOR);
        if !rel_change.is_finite() {
            return Err(diverged(&trace));
        }
        trace.push(IterationRecord {
            k,
            beta_accepted: ls.beta,
            psi,
            lyapunov: lyap,
            dh_prev_cur: ls.dh_prev_cur,
            dh_cur_y: ls.dh_cur_y,
            rel_change,
            fallback_y: ls.fallback_y,
        });
        x_prev = std::mem::replace(&mut x, next);
        if rel_change < config.tol {
            log::debug!("converged after {} iterations", k + 1);
            return Ok(SolverResult {
                x_final: x,
                iterations: trace.len(),
                converged: true,
                trace,
            });
        }
    }
    Ok(SolverResult {
        x_final: x,
        iterations: trace.len(),
        converged: false,
        trace,
    })
}
