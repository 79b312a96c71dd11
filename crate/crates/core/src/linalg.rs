//! Power iteration and seeded random vectors.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::point::{dot, norm, Point};

/// Real linear map with an adjoint.
pub trait LinearOperator: Send + Sync {
    fn apply(&self, x: &Point) -> Result<Point>;
    fn adjoint(&self, y: &Point) -> Result<Point>;

    /// `‖A‖²` on inputs of length `n`, by power iteration on `AᵀA`.
    fn norm_sq(&self, n: usize) -> Result<f64> {
        let mut rng = seeded_rng(0x0a0a);
        let est = power_iteration(
            |v| {
                let p = Point::from_raw(v.to_vec(), None);
                Ok(self.adjoint(&self.apply(&p)?)?.into_values())
            },
            gaussian_vec(&mut rng, n),
            500,
            1e-12,
        )?;
        Ok(est.value)
    }
}

/// `A = I`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Identity;

impl LinearOperator for Identity {
    fn apply(&self, x: &Point) -> Result<Point> {
        Ok(x.clone())
    }

    fn adjoint(&self, y: &Point) -> Result<Point> {
        Ok(y.clone())
    }

    fn norm_sq(&self, _n: usize) -> Result<f64> {
        Ok(1.0)
    }
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerEstimate {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Largest eigenvalue of a symmetric positive semidefinite operator.
///
/// Stops once successive Rayleigh quotients differ by at most
/// `tol·max(value, tiny)`. A start vector in the kernel of the operator yields 0.
pub fn power_iteration(
    mut apply: impl FnMut(&[f64]) -> Result<Vec<f64>>,
    start: Vec<f64>,
    max_iter: usize,
    tol: f64,
) -> Result<PowerEstimate> {
    let n0 = norm(&start);
    if !(n0 > 0.0) || !n0.is_finite() {
        return Err(Error::InvalidInput("power iteration needs a nonzero start".into()));
    }
    let mut v: Vec<f64> = start.iter().map(|x| x / n0).collect();
    let mut value = 0.0;
    for it in 1..=max_iter {
        let w = apply(&v)?;
        let rayleigh = dot(&v, &w);
        let nw = norm(&w);
        if !nw.is_finite() {
            return Err(Error::Numerical("power iteration overflowed".into()));
        }
        if nw == 0.0 {
            return Ok(PowerEstimate {
                value: 0.0,
                iterations: it,
                converged: true,
            });
        }
        let done = it > 1 && (rayleigh - value).abs() <= tol * rayleigh.abs().max(f64::MIN_POSITIVE);
        value = rayleigh;
        if done {
            return Ok(PowerEstimate {
                value,
                iterations: it,
                converged: true,
            });
        }
        v = w.iter().map(|x| x / nw).collect();
    }
    Ok(PowerEstimate {
        value,
        iterations: max_iter,
        converged: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_operator() {
        let d = [0.5, 3.0, 1.0];
        let est = power_iteration(
            |v| Ok(v.iter().zip(d).map(|(a, b)| a * b).collect()),
            vec![1.0, 1.0, 1.0],
            500,
            1e-12,
        )
        .unwrap();
        assert!(est.converged);
        assert!((est.value - 3.0).abs() < 1e-9);
    }

    #[test]
    fn zero_operator_gives_zero() {
        let est = power_iteration(|v| Ok(vec![0.0; v.len()]), vec![1.0; 4], 10, 1e-10).unwrap();
        assert_eq!(est.value, 0.0);
    }
}
