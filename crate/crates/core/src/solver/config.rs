use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

use super::DcProblem;

pub const DEFAULT_DELTA: f64 = 0.51;
pub const DEFAULT_EPSILON: f64 = 0.01;
pub const DEFAULT_BACKTRACK_FACTOR: f64 = 0.9;
pub const DEFAULT_BACKTRACK_MAX: usize = 50;
pub const DEFAULT_TOL: f64 = 1e-5;
pub const DEFAULT_MAX_ITER: usize = 1000;

/// Choice of the inertial parameter β_k.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BetaSchedule {
    /// β_k = 0: plain Bregman proximal DC iteration.
    Zero,
    /// Start every line search at a fixed β and shrink by the default factor.
    Fixed(f64),
    /// Start at (μ_k − 1)/μ_k with the FISTA recurrence on μ, shrink by `c`.
    FistaBacktrack { c: f64 },
}

impl BetaSchedule {
    pub fn fista() -> Self {
        BetaSchedule::FistaBacktrack {
            c: DEFAULT_BACKTRACK_FACTOR,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            BetaSchedule::Zero => "zero",
            BetaSchedule::Fixed(_) => "fixed",
            BetaSchedule::FistaBacktrack { .. } => "fista",
        }
    }
}

impl fmt::Display for BetaSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BetaSchedule::Zero => write!(f, "zero"),
            BetaSchedule::Fixed(b) => write!(f, "fixed:{b}"),
            BetaSchedule::FistaBacktrack { c } if *c == DEFAULT_BACKTRACK_FACTOR => write!(f, "fista"),
            BetaSchedule::FistaBacktrack { c } => write!(f, "fista:{c}"),
        }
    }
}

/// Parses `zero`, `fixed:<beta>`, `fista` or `fista:<c>`.
impl FromStr for BetaSchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let num = |a: Option<&str>| -> Result<f64> {
            a.ok_or_else(|| Error::InvalidInput(format!("beta mode `{s}` needs a value")))?
                .parse::<f64>()
                .map_err(|e| Error::InvalidInput(format!("beta mode `{s}`: {e}")))
        };
        match head {
            "zero" | "none" => Ok(BetaSchedule::Zero),
            "fixed" => Ok(BetaSchedule::Fixed(num(arg)?)),
            "fista" => Ok(BetaSchedule::FistaBacktrack {
                c: match arg {
                    Some(_) => num(arg)?,
                    None => DEFAULT_BACKTRACK_FACTOR,
                },
            }),
            _ => Err(Error::InvalidInput(format!("unknown beta mode `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    /// Step size λ.
    pub lambda: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub beta: BetaSchedule,
    /// Relative-change stopping tolerance.
    pub tol: f64,
    pub max_iter: usize,
    pub backtrack_max: usize,
}

impl SolverConfig {
    pub fn new(lambda: f64) -> Self {
        SolverConfig {
            lambda,
            delta: DEFAULT_DELTA,
            epsilon: DEFAULT_EPSILON,
            beta: BetaSchedule::fista(),
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            backtrack_max: DEFAULT_BACKTRACK_MAX,
        }
    }

    pub fn with_beta(mut self, beta: BetaSchedule) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    /// Line-search scale λ(δ − ε).
    pub fn inertial_budget(&self) -> f64 {
        self.lambda * (self.delta - self.epsilon)
    }

    /// Parameter-domain checks that do not depend on the problem.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return bad(format!("lambda must be positive, got {}", self.lambda));
        }
        if !(self.delta < 1.0 && self.delta >= self.epsilon && self.epsilon > 0.0) {
            return bad(format!(
                "need 1 > delta >= epsilon > 0, got delta={} epsilon={}",
                self.delta, self.epsilon
            ));
        }
        if !(self.tol > 0.0) {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if self.max_iter == 0 || self.backtrack_max == 0 {
            return bad("max_iter and backtrack_max must be positive".into());
        }
        match self.beta {
            BetaSchedule::Fixed(b) if !(0.0..1.0).contains(&b) => {
                bad(format!("fixed beta must lie in [0, 1), got {b}"))
            }
            BetaSchedule::FistaBacktrack { c } if !(c > 0.0 && c < 1.0) => {
                bad(format!("backtracking factor must lie in (0, 1), got {c}"))
            }
            _ => Ok(()),
        }
    }

    /// Step-size condition `1/λ > max{δ + η/κ, L}` for a given problem.
    pub fn validate_for(&self, problem: &DcProblem) -> Result<()> {
        self.validate()?;
        let kappa = problem.kernel().kappa();
        let eta = problem.weak_convexity_eta();
        let l = problem.smad_constant();
        let required = (self.delta + eta / kappa).max(l);
        let inv = 1.0 / self.lambda;
        if !(inv > required) {
            return Err(Error::Config(format!(
                "step size violates 1/lambda > max{{delta + eta/kappa, L}}: \
                 1/lambda = {inv:.6}, delta + eta/kappa = {:.6}, L = {l:.6} \
                 (need lambda < {:.6})",
                self.delta + eta / kappa,
                1.0 / required
            )));
        }
        Ok(())
    }
}
