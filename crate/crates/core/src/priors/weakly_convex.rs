use std::sync::Arc;

use crate::error::{Error, Result};
use crate::point::Point;
use crate::solver::{ProxFn, ScalarFn};

/// Componentwise soft threshold `sign(y) max(|y| − t, 0)`.
pub fn prox_l1(t: f64, y: &Point) -> Point {
    y.map(|v| v.signum() * (v.abs() - t).max(0.0))
}

/// Firm threshold: Euclidean prox of `λ·MCP(μ, θ)` for `λ < θ`.
pub fn prox_mcp(lambda: f64, mu: f64, theta: f64, y: &Point) -> Point {
    let lo = lambda * mu;
    let hi = theta * mu;
    let shrink = 1.0 - lambda / theta;
    y.map(|v| {
        let a = v.abs();
        if a <= lo {
            0.0
        } else if a <= hi {
            v.signum() * (a - lo) / shrink
        } else {
            v
        }
    })
}

/// `η`-weakly convex prior with a Euclidean proximal oracle `(λ, y) ↦
/// argmin_u λ φ(u) + ½‖u − y‖²`.
#[derive(Clone)]
pub struct WeaklyConvexPrior {
    pub value: ScalarFn,
    pub prox_euclidean: ProxFn,
    pub eta: f64,
}

impl std::fmt::Debug for WeaklyConvexPrior {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WeaklyConvexPrior").field("eta", &self.eta).finish()
    }
}

impl WeaklyConvexPrior {
    /// `μ‖x‖₁`.
    pub fn l1(mu: f64) -> Result<Self> {
        if !(mu >= 0.0) || !mu.is_finite() {
            return Err(Error::InvalidInput(format!("l1 weight must be >= 0, got {mu}")));
        }
        Ok(WeaklyConvexPrior {
            value: Arc::new(move |x: &Point| Ok(mu * x.values().iter().map(|v| v.abs()).sum::<f64>())),
            prox_euclidean: Arc::new(move |lambda, y: &Point| Ok(prox_l1(lambda * mu, y))),
            eta: 0.0,
        })
    }

    /// Minimax concave penalty, `1/θ`-weakly convex. Its prox needs `λ < θ`.
    pub fn mcp(mu: f64, theta: f64) -> Result<Self> {
        if !(mu >= 0.0 && theta > 0.0) || !mu.is_finite() || !theta.is_finite() {
            return Err(Error::InvalidInput(format!(
                "mcp needs mu >= 0 and theta > 0, got mu={mu} theta={theta}"
            )));
        }
        let value = move |x: &Point| {
            Ok(x.values()
                .iter()
                .map(|v| {
                    let a = v.abs();
                    if a <= theta * mu {
                        mu * a - a * a / (2.0 * theta)
                    } else {
                        0.5 * theta * mu * mu
                    }
                })
                .sum::<f64>())
        };
        let prox = move |lambda: f64, y: &Point| {
            if !(lambda < theta) {
                return Err(Error::InvalidInput(format!(
                    "mcp prox needs lambda < theta, got {lambda} >= {theta}"
                )));
            }
            Ok(prox_mcp(lambda, mu, theta, y))
        };
        Ok(WeaklyConvexPrior {
            value: Arc::new(value),
            prox_euclidean: Arc::new(prox),
            eta: 1.0 / theta,
        })
    }

    pub fn value(&self, x: &Point) -> Result<f64> {
        (self.value)(x)
    }

    pub fn prox(&self, lambda: f64, y: &Point) -> Result<Point> {
        (self.prox_euclidean)(lambda, y)
    }
}
