use crate::kernel::{bregman_distance_unchecked, Kernel};
use crate::point::Point;

use super::config::{BetaSchedule, SolverConfig, DEFAULT_BACKTRACK_FACTOR};

/// Outcome of the inertial line search at one iteration.
#[derive(Clone, Debug)]
pub struct LineSearch {
    pub beta: f64,
    pub y: Point,
    pub new_mu: f64,
    /// `y` left int dom(h) and was reset to `x_k`.
    pub fallback_y: bool,
    /// `D_h(x_{k−1}, x_k)`.
    pub dh_prev_cur: f64,
    /// `D_h(x_k, y)` for the returned `y`.
    pub dh_cur_y: f64,
}

/// `y = x_k + β (x_k − x_{k−1})`.
pub fn inertial_candidate(x_k: &Point, x_km1: &Point, beta: f64) -> crate::Result<Point> {
    x_k.check_same_len(x_km1, "inertial candidate")?;
    if beta == 0.0 {
        return Ok(x_k.clone());
    }
    Ok(x_k.axpy(beta, &x_k.sub(x_km1)))
}

/// FISTA recurrence `μ⁺ = (1 + √(1 + 4μ²)) / 2`.
pub fn next_mu(mu: f64) -> f64 {
    0.5 * (1.0 + (1.0 + 4.0 * mu * mu).sqrt())
}

/// Largest β in `{β₀, cβ₀, c²β₀, …}` satisfying
/// `λ(δ − ε) D_h(x_{k−1}, x_k) ≥ D_h(x_k, y)`, or β = 0 after
/// `backtrack_max` rejections. Membership in int dom(h) is checked with the
/// kernel's own predicate.
pub fn line_search_beta(
    h: &Kernel,
    config: &SolverConfig,
    x_k: &Point,
    x_km1: &Point,
    mu_state: f64,
) -> crate::Result<LineSearch> {
    line_search_in(h, config, x_k, x_km1, mu_state, &|p| h.contains(p))
}

pub(crate) fn line_search_in(
    h: &Kernel,
    config: &SolverConfig,
    x_k: &Point,
    x_km1: &Point,
    mu_state: f64,
    in_domain: &dyn Fn(&Point) -> bool,
) -> crate::Result<LineSearch> {
    x_k.check_same_len(x_km1, "line search")?;
    let new_mu = next_mu(mu_state);
    let (beta0, c) = match config.beta {
        BetaSchedule::Zero => (0.0, DEFAULT_BACKTRACK_FACTOR),
        BetaSchedule::Fixed(b) => (b, DEFAULT_BACKTRACK_FACTOR),
        BetaSchedule::FistaBacktrack { c } => ((mu_state - 1.0) / mu_state, c),
    };
    let dh_prev_cur = bregman_distance_unchecked(h, x_km1, x_k);
    let stay = |fallback_y| LineSearch {
        beta: 0.0,
        y: x_k.clone(),
        new_mu,
        fallback_y,
        dh_prev_cur,
        dh_cur_y: 0.0,
    };
    // With x_k = x_{k−1} every β gives y = x_k; report no extrapolation.
    if beta0 <= 0.0 || x_k == x_km1 {
        return Ok(stay(false));
    }

    let budget = config.inertial_budget() * dh_prev_cur;
    let step = x_k.sub(x_km1);
    let mut beta = beta0;
    for _ in 0..config.backtrack_max {
        let y = x_k.axpy(beta, &step);
        if !in_domain(&y) {
            return Ok(stay(true));
        }
        let dh_cur_y = bregman_distance_unchecked(h, x_k, &y);
        if budget >= dh_cur_y {
            return Ok(LineSearch {
                beta,
                y,
                new_mu,
                fallback_y: false,
                dh_prev_cur,
                dh_cur_y,
            });
        }
        beta *= c;
    }
    Ok(stay(false))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(v: &[f64]) -> Point {
        Point::new(v.to_vec()).unwrap()
    }

    #[test]
    fn candidate_formula() {
        assert_eq!(inertial_candidate(&pt(&[1., 1.]), &pt(&[1., 1.]), 0.5).unwrap(), pt(&[1., 1.]));
        assert_eq!(inertial_candidate(&pt(&[2., 0.]), &pt(&[0., 0.]), 0.5).unwrap(), pt(&[3., 0.]));
        assert_eq!(inertial_candidate(&pt(&[2., 5.]), &pt(&[7., 0.]), 0.0).unwrap(), pt(&[2., 5.]));
        assert!(inertial_candidate(&pt(&[1.]), &pt(&[1., 2.]), 0.1).is_err());
    }

    #[test]
    fn stationary_pair_reports_zero_beta() {
        let cfg = SolverConfig::new(0.5);
        let x = pt(&[1.0, -2.0]);
        let ls = line_search_beta(&Kernel::Euclidean, &cfg, &x, &x, 3.0).unwrap();
        assert_eq!(ls.beta, 0.0);
        assert_eq!(ls.y, x);
    }

    #[test]
    fn first_iteration_has_zero_beta() {
        let cfg = SolverConfig::new(0.5);
        let ls = line_search_beta(&Kernel::Euclidean, &cfg, &pt(&[1.0]), &pt(&[0.0]), 1.0).unwrap();
        assert_eq!(ls.beta, 0.0);
        assert!((ls.new_mu - 1.618_033_988_749_895).abs() < 1e-15);
    }

    #[test]
    fn euclidean_beta_respects_sqrt_budget() {
        // λ(δ − ε) = 0.25 so β ≤ 0.5.
        let cfg = SolverConfig::new(0.5);
        assert!((cfg.inertial_budget() - 0.25).abs() < 1e-15);
        let ls = line_search_beta(&Kernel::Euclidean, &cfg, &pt(&[1.0, 1.0]), &pt(&[0.0, 0.5]), 50.0)
            .unwrap();
        assert!(ls.beta > 0.0 && ls.beta <= 0.5 + 1e-12);
        assert!(cfg.inertial_budget() * ls.dh_prev_cur >= ls.dh_cur_y);
    }

    #[test]
    fn domain_exit_resets_to_current_point() {
        let cfg = SolverConfig::new(0.5);
        let x = pt(&[0.1]);
        let ls = line_search_in(&Kernel::Euclidean, &cfg, &x, &pt(&[0.5]), 10.0, &|p| {
            p.values()[0] > 0.0
        })
        .unwrap();
        assert!(ls.fallback_y);
        assert_eq!(ls.beta, 0.0);
        assert_eq!(ls.y, x);
    }
}
