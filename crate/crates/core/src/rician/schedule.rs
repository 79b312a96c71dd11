use crate::error::{Error, Result};
use crate::solver::{SolverConfig, DEFAULT_EPSILON};

/// Noise levels with tabulated `(λ_c, μ)`, on the 8-bit intensity scale.
pub const TABULATED_SIGMAS: [f64; 4] = [2.55, 7.65, 12.75, 25.5];
const LAMBDA_C: [f64; 4] = [0.0385, 0.102, 0.1462, 0.7312];
const MU: [f64; 4] = [1.9, 1.6, 1.3, 1.3];

/// Step-size and prior-weight schedule indexed by the noise level σ.
#[derive(Clone, Debug, PartialEq)]
pub struct RicianSchedule {
    pub sigma: f64,
    pub lambda_c: f64,
    pub mu: f64,
    /// `min{1/(2δ), σ²} λ_c`.
    pub lambda: f64,
    /// `√(λ μ)`.
    pub gamma: f64,
    /// `√(λ(δ − ε))`, the Euclidean ceiling on accepted β.
    pub pi_bound: f64,
    pub delta: f64,
    pub epsilon: f64,
    /// σ is not one of [`TABULATED_SIGMAS`].
    pub interpolated: bool,
}

impl RicianSchedule {
    /// Solver configuration with this schedule's λ, δ and ε.
    pub fn solver_config(&self) -> SolverConfig {
        let mut c = SolverConfig::new(self.lambda);
        c.delta = self.delta;
        c.epsilon = self.epsilon;
        c
    }
}

pub fn rician_schedule(sigma: f64, delta: f64) -> Result<RicianSchedule> {
    rician_schedule_with(sigma, delta, DEFAULT_EPSILON)
}

/// Tabulated values at the four reference σ; linear in σ between them and
/// clamped outside.
pub fn rician_schedule_with(sigma: f64, delta: f64, epsilon: f64) -> Result<RicianSchedule> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidInput(format!("sigma must be positive, got {sigma}")));
    }
    if !(delta > 0.0 && delta < 1.0 && epsilon > 0.0 && epsilon <= delta) {
        return Err(Error::Config(format!(
            "need 1 > delta >= epsilon > 0, got delta={delta} epsilon={epsilon}"
        )));
    }
    let exact = TABULATED_SIGMAS.iter().position(|&s| s == sigma);
    let (lambda_c, mu) = match exact {
        Some(i) => (LAMBDA_C[i], MU[i]),
        None => (interp(sigma, &LAMBDA_C), interp(sigma, &MU)),
    };
    let lambda = (0.5 / delta).min(sigma * sigma) * lambda_c;
    Ok(RicianSchedule {
        sigma,
        lambda_c,
        mu,
        lambda,
        gamma: (lambda * mu).sqrt(),
        pi_bound: (lambda * (delta - epsilon)).sqrt(),
        delta,
        epsilon,
        interpolated: exact.is_none(),
    })
}

fn interp(sigma: f64, ys: &[f64; 4]) -> f64 {
    let xs = &TABULATED_SIGMAS;
    if sigma <= xs[0] {
        return ys[0];
    }
    if sigma >= xs[3] {
        return ys[3];
    }
    let i = xs.windows(2).position(|w| sigma < w[1]).unwrap_or(2);
    let t = (sigma - xs[i]) / (xs[i + 1] - xs[i]);
    ys[i] + t * (ys[i + 1] - ys[i])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tabulated_entries() {
        let s = rician_schedule(25.5, 0.51).unwrap();
        assert_eq!((s.lambda_c, s.mu), (0.7312, 1.3));
        assert!(!s.interpolated);
        assert!((s.lambda - 0.7312 / 1.02).abs() < 1e-15);
        let s = rician_schedule(2.55, 0.51).unwrap();
        assert!(s.lambda < 2.55 * 2.55);
        assert!(s.lambda < 1.0 / 1.02);
    }

    #[test]
    fn interpolation_and_clamping() {
        let s = rician_schedule(5.1, 0.51).unwrap();
        assert!(s.interpolated);
        assert!((s.lambda_c - 0.5 * (0.0385 + 0.102)).abs() < 1e-15);
        assert!((s.mu - 1.75).abs() < 1e-15);
        assert_eq!(rician_schedule(100.0, 0.51).unwrap().lambda_c, 0.7312);
        assert_eq!(rician_schedule(0.5, 0.51).unwrap().mu, 1.9);
        // σ² caps λ for very small σ.
        let s = rician_schedule(0.5, 0.51).unwrap();
        assert!((s.lambda - 0.25 * 0.0385).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_sigma() {
        assert!(matches!(rician_schedule(0.0, 0.51), Err(Error::InvalidInput(_))));
        assert!(rician_schedule(-1.0, 0.51).is_err());
    }
}
